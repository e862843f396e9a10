#pragma once

#include <string>
#include <vector>

#include "harvester/model.hpp"

namespace harvester {

struct SpectralFunctions {
  Cx g1;  // -e^{i 2 c1 lambda} + r11 - 1
  Cx g2;  // -e^{i 2 c3 lambda^{1/2}} - i
  Cx h1;  // r22 + 2 c4 e^{i 2 c3 lambda^{1/2}}
};

SpectralFunctions spectral_functions(Cx lambda, const BoundaryConstants& bc,
                                     const DerivedConstants& d);

// branch 1: n pi / c1 - i ln(r11 - 1) / (2 c1)   (requires r11 > 1)
// branch 2: (n - 1/4)^2 pi^2 / c3^2              (real positive)
Cx unperturbed_branch(int branch, int n, const BoundaryConstants& bc,
                      const DerivedConstants& d);

struct AdmissibilityOptions {
  double delta = 0.1;  // |g2| must stay above this near the branch point
  double kappa = 1.0;  // disk radius kappa * n^{-1/2}
};

struct Admissibility {
  bool admissible;
  double g2_center;        // |g2| at the unperturbed branch point
  double g2_min_estimate;  // center minus the Lipschitz correction over the disk
};

Admissibility branch1_admissible(int n, double delta, const BoundaryConstants& bc,
                                 const DerivedConstants& d, double kappa = 1.0);

struct BranchEigenvalue {
  int branch = 1;
  int n = 1;
  Cx lambda_unperturbed;
  Cx correction_w;
  Cx lambda_perturbed;  // lambda_unperturbed * (1 + correction_w)
  bool admissible = true;
  int newton_iterations = 0;  // branch 2 only
  Cx K1;                      // branch 1 only
  bool mirrored = false;
  bool flagged = false;  // log wraparound, tiny-g1 guess fallback, sweep failure
  std::string flag_note;
};

BranchEigenvalue perturbed_branch1(int n, const BoundaryConstants& bc,
                                   const DerivedConstants& d, AdmissibilityOptions opt = {});

BranchEigenvalue perturbed_branch2(int n, double tol, const BoundaryConstants& bc,
                                   const DerivedConstants& d);

// The spectrum is symmetric about the imaginary axis; the mirror of a branch
// record negates the real parts and conjugates the correction.
BranchEigenvalue mirror_record(const BranchEigenvalue& r);

struct ReducedTerms {
  Cx D1;
  Cx D1_tilde;
  Cx D2;
};

// The grouped form of the rescaled spectral equation, D1 - D2 = O(lambda^{-3/2}),
// with the exponentials replaced by their leading forms. Diagnostic only; the
// piezo parameters first appear in the lambda^{-1} bracket of D1.
ReducedTerms reduced_equation_terms(Cx lambda, const BoundaryConstants& bc,
                                    const DerivedConstants& d);

// branch = 1, 2, or 0 for both. Per-n failures are converted into flagged
// records (flag_note carries the cause) so a sweep never aborts wholesale.
// Mirrors appended when with_mirrors is set; output sorted by (branch, n,
// mirrored).
std::vector<BranchEigenvalue> branch_sweep(int branch, int n_max, const BoundaryConstants& bc,
                                           const DerivedConstants& d,
                                           AdmissibilityOptions opt = {},
                                           double newton_tol = 1e-12,
                                           bool with_mirrors = false);

}  // namespace harvester
