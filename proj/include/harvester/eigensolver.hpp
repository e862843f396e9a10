#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "harvester/asymptotics.hpp"
#include "harvester/dispersion.hpp"
#include "harvester/model.hpp"
#include "harvester/state.hpp"
#include "harvester/types.hpp"

namespace harvester {

struct Disk {
  Cx center;
  double radius = 0.0;
};

// Axis-aligned search rectangle in the spectral plane.  The circuit pole
// i/(CpR) must always sit inside one of the exclusion disks (default_region
// takes care of that); the solver never reports roots inside an exclusion.
struct SearchRegion {
  double re_min = 0.0, re_max = 1.0;
  double im_min = 0.0, im_max = 1.0;
  std::vector<Disk> exclusions;
  int boundary_samples_min = 64;
  int max_depth = 40;
  // expected phase change of the sampled function per unit boundary length;
  // 0 disables the density floor and leaves pure adaptive bisection
  double phase_rate = 0.0;

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  double diameter() const;
  bool contains(Cx z) const;
};

// Canonical window for parameter set p: Re in [a,b], Im in [c,d], pole disk
// excluded.
SearchRegion make_region(const ValidatedParameters& p, double re_min, double re_max,
                         double im_min, double im_max);
SearchRegion default_region(const ValidatedParameters& p);

enum class Method { Determinant, Collocation, Asymptotic1, Asymptotic2 };
enum class RecordStatus { Ok, Unresolved, NotConverged };

std::string to_string(Method m);
std::string to_string(RecordStatus s);

struct EigenvalueRecord {
  Cx value{0.0, 0.0};
  Method method = Method::Determinant;
  int branch = 0;  // 1 or 2 when classified, 0 = unclassified
  int n = 0;       // matched asymptotic index, 0 = none
  double residual = 0.0;
  int multiplicity = 1;
  std::optional<bool> admissible;  // branch-1 matches only
  RecordStatus status = RecordStatus::Ok;
  bool mirrored = false;
};

// Analytic-function sampler for contour work: one call yields the value and
// a local magnitude yardstick used to normalize "how small is small".
struct ContourFn {
  std::function<std::pair<Cx, double>(Cx)> eval;
};

ContourFn dispersion_contour(const DispersionEvaluator& ev);

// Winding number of f along the region boundary (minus any exclusion disk
// lying inside), with adaptive sampling keeping phase steps below pi/2.
int count_zeros(const SearchRegion& region, const ContourFn& f);

struct RefineResult {
  Cx lambda{0.0, 0.0};
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Muller iteration; |f| <= tol * local scale stops it, steps are capped by
// max_step so the iterate cannot leave the originating box neighbourhood.
RefineResult refine_root(Cx lambda0, const ContourFn& f, double tol, double max_step);

struct SolveOptions {
  double refine_tol = 1e-10;  // residual acceptance: |f| <= tol * condition
  double dedup_rel = 1e-8;
  double match_fraction = 0.2;  // of local branch spacing
  int threads = 0;              // 0 = one worker per hardware thread
  AdmissibilityOptions admissibility{};
  double newton_tol = 1e-12;
  bool append_mirrors = true;
  bool classify = true;
};

struct SpectrumResult {
  std::vector<EigenvalueRecord> records;  // sorted by (Re, Im)
  int total_count = 0;                    // winding count of the whole region
  int unresolved_boxes = 0;
};

SpectrumResult find_spectrum(const SearchRegion& region, const ValidatedParameters& p,
                             const SolveOptions& opt = {});

// Locate the one numeric root matching asymptotic branch point (branch, n):
// a small box around the second-order prediction, widened once if empty.
std::optional<EigenvalueRecord> find_branch_root(const ValidatedParameters& p,
                                                 int branch, int n,
                                                 const SolveOptions& opt = {});

// Chebyshev collocation of the five-component first-order system on N nodes
// (4N+1 unknowns); returns eigenvalues stable to 1e-6 relative between the
// N-node and 5N/4-node grids.
std::vector<Cx> collocation_eigenvalues(const ValidatedParameters& p, int N);
// Single-grid solve without the stability filter (diagnostics).
std::vector<Cx> collocation_eigenvalues_raw(const ValidatedParameters& p, int N);

struct CollocationMode {
  Cx lambda{0.0, 0.0};
  StateFunction state;
};

// Filtered eigenpair of smallest |lambda|; the eigenvector is returned on the
// collocation grid, normalized to unit sup magnitude.
CollocationMode collocation_lowest_mode(const ValidatedParameters& p, int N);

// Explicit inverse: solves A f = g through the closed-form integral formulas.
StateFunction apply_inverse(const StateFunction& g, const ValidatedParameters& p);
// Forward operator on a smooth state (spectral differentiation).
StateFunction apply_forward(const StateFunction& f, const ValidatedParameters& p);

struct PowerIterationResult {
  Cx lambda{0.0, 0.0};  // eigenvalue of A (reciprocal of the A^{-1} estimate)
  double drift = 0.0;   // relative change of the estimate over the last step
  int iterations = 0;
};

// Power iteration on A^{-1} from a supplied seed state.  Mirror-symmetric
// spectra make the dominant pair equal in modulus, so the seed must already
// favour one member (a collocation eigenvector does).
PowerIterationResult inverse_power_iteration(const StateFunction& seed,
                                             const ValidatedParameters& p,
                                             int iterations = 6);

}  // namespace harvester
