#include <cmath>
#include <vector>

#include "doctest.h"
#include "harvester/asymptotics.hpp"
#include "harvester/eigensolver.hpp"
#include "harvester/verification.hpp"

using namespace harvester;

namespace {

ValidatedParameters defaults() { return validate_parameters(default_parameters()); }

struct Setup {
  ValidatedParameters p = defaults();
  DerivedConstants d = derive_constants(p);
  BoundaryConstants bc = boundary_constants(p, d);
};

bool near(Cx got, Cx want, double tol) {
  return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

}  // namespace

TEST_CASE("spectral building blocks at lambda = 100 match reference values") {
  Setup s;
  SpectralFunctions f = spectral_functions(Cx{100.0, 0.0}, s.bc, s.d);
  CHECK(near(f.g1, Cx{-0.1538543416736725770214, 0.873297297213994581733}, 1e-13));
  CHECK(near(f.g2, Cx{-0.7747945205547640755678, -1.63221313725539844116}, 1e-13));
  CHECK(near(f.h1, Cx{2.053491475428044194364, 0.02912833641778768456682}, 1e-13));
}

TEST_CASE("leading branch points match their closed forms") {
  Setup s;
  // with G = J = L = 1 and k2 = 2 the first torsion point is pi + (i/2) ln 3
  const Cx b1 = unperturbed_branch(1, 1, s.bc, s.d);
  CHECK(std::abs(b1 - Cx{3.141592653589793238463, 0.5493061443340548456976}) < 1e-13);
  const Cx b1n7 = unperturbed_branch(1, 7, s.bc, s.d);
  CHECK(std::abs(b1n7 - Cx{7 * 3.141592653589793238463, 0.5493061443340548456976}) < 1e-12);

  const Cx b2 = unperturbed_branch(2, 1, s.bc, s.d);
  CHECK(std::abs(b2 - Cx{5.819713108934560037027, 0.0}) < 1e-13);
  // quadratic growth of the bending family
  const Cx b2n3 = unperturbed_branch(2, 3, s.bc, s.d);
  const double want = std::pow((3.0 - 0.25) * 3.141592653589793238463 / s.d.c3, 2);
  CHECK(b2n3.real() == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("branch-1 correction matches reference values at n = 10 and 25") {
  Setup s;
  BranchEigenvalue r10 = perturbed_branch1(10, s.bc, s.d);
  CHECK(near(r10.K1, Cx{0.8461603528528294278557, -0.03326212356585811685222}, 1e-12));
  CHECK(near(r10.correction_w,
             Cx{-0.0005788597633275566842155, 0.002656460186308486647398}, 1e-11));
  CHECK(std::abs(r10.lambda_perturbed -
                 r10.lambda_unperturbed * (1.0 + r10.correction_w)) < 1e-13);
  CHECK_FALSE(r10.flagged);

  BranchEigenvalue r25 = perturbed_branch1(25, s.bc, s.d);
  CHECK(near(r25.K1, Cx{0.8326708696648529568279, 0.01787907752524714158875}, 1e-12));
  CHECK(near(r25.correction_w,
             Cx{0.0001448097020035102078136, 0.001163277931378733936278}, 1e-11));
}

TEST_CASE("admissibility tracks the oscillation of g2") {
  Setup s;
  // |g2| dips toward zero near n = 10, 25, 46 for the default constants
  CHECK_FALSE(branch1_admissible(10, 0.1, s.bc, s.d).admissible);
  CHECK_FALSE(branch1_admissible(25, 0.1, s.bc, s.d).admissible);
  CHECK(branch1_admissible(15, 0.1, s.bc, s.d).admissible);
  CHECK(branch1_admissible(20, 0.1, s.bc, s.d).admissible);

  Admissibility a15 = branch1_admissible(15, 0.1, s.bc, s.d);
  SpectralFunctions f15 =
      spectral_functions(unperturbed_branch(1, 15, s.bc, s.d), s.bc, s.d);
  CHECK(a15.g2_center == doctest::Approx(std::abs(f15.g2)).epsilon(1e-12));
  CHECK(a15.g2_min_estimate <= a15.g2_center);

  BranchEigenvalue r10 = perturbed_branch1(10, s.bc, s.d);
  CHECK_FALSE(r10.admissible);  // value still computed, only marked
}

TEST_CASE("branch-2 correction matches reference values") {
  Setup s;
  BranchEigenvalue r1 = perturbed_branch2(1, 1e-12, s.bc, s.d);
  CHECK(near(r1.correction_w,
             Cx{0.004872152729339454887939, 0.3072994246021817251007}, 1e-10));
  CHECK(r1.newton_iterations > 0);

  BranchEigenvalue r5 = perturbed_branch2(5, 1e-12, s.bc, s.d);
  CHECK(std::abs(r5.lambda_unperturbed - Cx{233.435159147264019263, 0.0}) < 1e-10);
  CHECK(near(r5.correction_w,
             Cx{0.000276567542426668240952, 0.007765134498895351610285}, 1e-10));

  BranchEigenvalue r20 = perturbed_branch2(20, 1e-12, s.bc, s.d);
  CHECK(std::abs(r20.lambda_unperturbed - Cx{4035.647723651176576787, 0.0}) < 1e-8);
  CHECK(near(r20.correction_w,
             Cx{0.000009058034056399024091149, 0.0004506373415231934005818}, 1e-9));
}

TEST_CASE("the two corrections decay at their advertised rates") {
  Setup s;
  std::vector<double> n1, w1, n2, w2;
  for (int n = 10; n <= 120; ++n) {
    BranchEigenvalue r = perturbed_branch1(n, s.bc, s.d);
    if (!r.admissible || r.flagged) continue;
    n1.push_back(n);
    w1.push_back(std::abs(r.correction_w));
  }
  for (int n = 5; n <= 60; ++n) {
    BranchEigenvalue r = perturbed_branch2(n, 1e-12, s.bc, s.d);
    n2.push_back(n);
    w2.push_back(std::abs(r.correction_w));
  }
  CHECK(fit_power_law(n1, w1).exponent == doctest::Approx(-1.5).epsilon(0.2));
  CHECK(fit_power_law(n2, w2).exponent == doctest::Approx(-2.0).epsilon(0.15));
}

TEST_CASE("mirror records negate the real part") {
  Setup s;
  BranchEigenvalue r = perturbed_branch1(12, s.bc, s.d);
  BranchEigenvalue m = mirror_record(r);
  CHECK(m.mirrored);
  CHECK(std::abs(m.lambda_perturbed + std::conj(r.lambda_perturbed)) < 1e-15);
  CHECK(std::abs(m.lambda_unperturbed + std::conj(r.lambda_unperturbed)) < 1e-15);
}

TEST_CASE("sweep is sorted, complete, and never aborts wholesale") {
  Setup s;
  auto both = branch_sweep(0, 8, s.bc, s.d);
  // one record per (branch, n), branches 1 and 2
  int count1 = 0, count2 = 0;
  for (const auto& r : both) {
    if (r.branch == 1) ++count1;
    if (r.branch == 2) ++count2;
    CHECK_FALSE(r.mirrored);
  }
  CHECK(count1 == 8);
  CHECK(count2 == 8);
  for (std::size_t i = 1; i < both.size(); ++i) {
    const bool ordered = both[i - 1].branch < both[i].branch ||
                         (both[i - 1].branch == both[i].branch && both[i - 1].n < both[i].n);
    CHECK(ordered);
  }

  auto mirrored = branch_sweep(0, 8, s.bc, s.d, {}, 1e-12, true);
  CHECK(mirrored.size() == 2 * both.size());
}

TEST_CASE("grouped reduced equation closes at the spectrum") {
  // D1 - D2 = 0 is the truncated spectral equation: it nearly vanishes at
  // eigenvalues, stays O(1) away from them, and carrying the lambda^{-1} terms
  // must beat the two-order truncation g1 g2 + [...] lambda^{-1/2}
  Setup s;
  ValidatedParameters p = validate_parameters(default_parameters());

  std::vector<double> mags, gaps;
  for (int n : {10, 14, 20, 28, 40, 57, 80}) {
    auto r = find_branch_root(p, 1, n);
    REQUIRE(r.has_value());
    const Cx lam = r->value;

    ReducedTerms t = reduced_equation_terms(lam, s.bc, s.d);
    const double gap = std::abs(t.D1 - t.D2);
    mags.push_back(std::abs(lam));
    gaps.push_back(gap);

    SpectralFunctions f = spectral_functions(lam, s.bc, s.d);
    const Cx two_order =
        f.g1 * f.g2 + (Cx{0, 1} * f.g1 * f.h1 + s.bc.r11 * s.bc.rhat11 * f.g2 -
                       Cx{0, 1} * s.bc.r12 * s.bc.r21) /
                          std::sqrt(lam);
    CHECK(gap < std::abs(two_order));

    ReducedTerms off = reduced_equation_terms(lam + Cx{1.5, 0.3}, s.bc, s.d);
    CHECK(gap < 0.1 * std::abs(off.D1 - off.D2));
  }
  // remainder after the lambda^{-1} terms; oscillatory coefficient, so assert
  // a conservative band around the observed ~ -2.3
  LogFit fit = fit_power_law(mags, gaps);
  CHECK(fit.exponent < -1.2);
}
