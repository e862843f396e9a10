#pragma once

#include <string>
#include <vector>

#include "harvester/eigensolver.hpp"
#include "harvester/model.hpp"
#include "harvester/state.hpp"
#include "harvester/types.hpp"

namespace harvester {

// <f,g> = (1/2) int [E f0'' conj(g0'') + m f1 conj(g1) + G f2' conj(g2')
//                    + J f3 conj(g3) + S(f1 conj(g3) + f3 conj(g1))] dx
//         + (1/2) Cp f4 conj(g4)
// Derivatives are spectral, the quadrature is Clenshaw-Curtis on the state's
// own grid.
Cx energy_inner_product(const StateFunction& f, const StateFunction& g,
                        const ValidatedParameters& p);

// Squared product norm: H^2 x L^2 x H^1 x L^2 x C.
double product_norm1(const StateFunction& f);

struct NormEquivalenceConstants {
  double c0 = 0.0;  // 1/(L^4 + L^2 + 1)
  double c2 = 0.0;  // 1/(L^2 + 1)
  double c = 0.0;   // lower constant: c * |f|_1^2 <= <f,f>
  double C = 0.0;   // upper constant: <f,f> <= C * |f|_1^2
};

NormEquivalenceConstants norm_equivalence_constants(const ValidatedParameters& p);

struct NormEquivalenceReport {
  NormEquivalenceConstants constants;
  int samples = 0;
  int violations = 0;
  double worst_lower_margin = 0.0;  // min over samples of <f,f> - c|f|_1^2
  double worst_upper_margin = 0.0;  // min over samples of C|f|_1^2 - <f,f>
  std::vector<std::string> issues;
};

NormEquivalenceReport norm_equivalence_check(int samples, const ValidatedParameters& p,
                                             int grid_points = 64,
                                             unsigned long long seed = 20240816ull);

struct SpectrumPropertyReport {
  bool mirror_ok = true;
  bool imaginary_ok = true;
  bool imaginary_applicable = false;  // only checked when CI = -CD
  bool pole_ok = true;
  bool piezo_invariance_ok = true;
  std::vector<std::string> issues;

  bool all_ok() const {
    return mirror_ok && (imaginary_ok || !imaginary_applicable) && pole_ok &&
           piezo_invariance_ok;
  }
};

// (i) mirror closure of the record set, (ii) Im > 0 in the balanced case,
// (iii) no record inside the circuit-pole exclusion disk, (iv) second-order
// branch quantities bit-identical under a piezo-parameter change.
SpectrumPropertyReport spectrum_property_check(
    const std::vector<EigenvalueRecord>& records, const ValidatedParameters& p);

struct PiezoSet {
  double Cp = 1.0, R = 1.0, CD = -0.1, CI = 0.1;
};

struct PerturbationPair {
  int branch = 0;
  int n = 0;
  Cx lambda_base{0.0, 0.0};
  Cx lambda_pert{0.0, 0.0};
  double shift = 0.0;
  double second_order_mag = 0.0;  // |w_n * lambda_tilde_n|
  double ratio = 0.0;             // shift / second_order_mag
};

struct PerturbationReport {
  PiezoSet baseline;
  PiezoSet perturbed;
  std::vector<PerturbationPair> pairs;  // sorted by (branch, n)
  // log-log slope of shift and of the second-order magnitude vs n, per branch
  // (NaN when fewer than 3 pairs)
  double branch1_shift_exponent = 0.0;
  double branch1_second_exponent = 0.0;
  double branch2_shift_exponent = 0.0;
  double branch2_second_exponent = 0.0;
};

struct SweepRanges {
  int b1_lo = 10, b1_hi = 25;
  int b2_lo = 1, b2_hi = 10;
};

// Eigenvalue drift under piezo-parameter changes: piezo_grid[0] is the
// baseline; one report per further entry.  Roots are hunted per (branch, n)
// with targeted windows around the second-order predictions.
std::vector<PerturbationReport> perturbation_sweep(const BeamParameters& mechanical,
                                                   const std::vector<PiezoSet>& piezo_grid,
                                                   const SweepRanges& ranges = {},
                                                   const SolveOptions& opt = {});

struct LogFit {
  double exponent = 0.0;         // least-squares slope in log-log coordinates
  double log_coefficient = 0.0;  // intercept
  double rms = 0.0;              // residual scatter
};

// Least-squares power-law fit y ~ coeff * x^exponent (positive data only).
LogFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace harvester
