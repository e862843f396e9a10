#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "harvester/eigensolver.hpp"

using namespace harvester;

namespace {
ValidatedParameters defaults() { return validate_parameters(default_parameters()); }
}  // namespace

TEST_CASE("decoupled torsion eigenvalues are reproduced exactly") {
  // with S = 0 the twist equation separates and its eigenvalues have the
  // closed form n pi / c1 + i ln((k2+G a1)/(k2-G a1)) / (2 c1)
  BeamParameters p = default_parameters();
  p.S = 0.0;
  ValidatedParameters v = validate_parameters(p);
  DerivedConstants d = derive_constants(v);

  auto eig = collocation_eigenvalues(v, 48);
  REQUIRE(eig.size() > 3);

  const double imag = std::log((p.k2 + p.G * d.a1) / (p.k2 - p.G * d.a1)) / (2.0 * d.c1);
  for (int n = 1; n <= 3; ++n) {
    const Cx want{n * 3.141592653589793238463 / d.c1, imag};
    double best = 1e300;
    for (Cx e : eig) best = std::min(best, std::abs(e - want));
    CHECK(best < 1e-6 * std::abs(want));
  }
}

TEST_CASE("two-grid filter keeps only grid-stable eigenvalues") {
  ValidatedParameters p = defaults();
  auto filtered = collocation_eigenvalues(p, 40);
  auto raw = collocation_eigenvalues_raw(p, 40);
  REQUIRE(filtered.size() >= 3);
  CHECK(filtered.size() < raw.size());
  for (Cx f : filtered) {
    double best = 1e300;
    for (Cx r : raw) best = std::min(best, std::abs(r - f));
    CHECK(best < 1e-6 * std::max(1.0, std::abs(f)));
  }
}

TEST_CASE("coarse grids are refused") {
  ValidatedParameters p = defaults();
  CHECK_THROWS_AS(collocation_eigenvalues(p, 16), Error);
  CHECK_THROWS_AS(collocation_lowest_mode(p, 8), Error);
}

TEST_CASE("collocation and determinant agree on interior eigenvalues") {
  ValidatedParameters p = defaults();
  DispersionEvaluator ev(p);
  auto eig = collocation_eigenvalues(p, 56);
  int checked = 0;
  for (Cx e : eig) {
    if (e.real() < 0.5 || e.real() > 20.0 || e.imag() < -0.5 || e.imag() > 8.0) continue;
    DispersionValue v = ev(e);
    CHECK(std::abs(v.value) < 1e-4 * v.condition);
    ++checked;
  }
  CHECK(checked >= 4);
}

TEST_CASE("lowest mode pairs an eigenvalue with a normalized state") {
  ValidatedParameters p = defaults();
  CollocationMode mode = collocation_lowest_mode(p, 48);

  double sup = 0.0;
  for (Cx z : mode.state.f0) sup = std::max(sup, std::abs(z));
  for (Cx z : mode.state.f1) sup = std::max(sup, std::abs(z));
  for (Cx z : mode.state.f2) sup = std::max(sup, std::abs(z));
  for (Cx z : mode.state.f3) sup = std::max(sup, std::abs(z));
  sup = std::max(sup, std::abs(mode.state.f4));
  CHECK(sup == doctest::Approx(1.0).epsilon(1e-9));

  // clamped-end constraints carried by the state space
  CHECK(std::abs(mode.state.f0.front()) < 1e-8);
  CHECK(std::abs(mode.state.f2.front()) < 1e-8);

  // the eigenvalue is the small purely-imaginary-axis mode of the default set
  CHECK(std::abs(mode.lambda) == doctest::Approx(0.549155).epsilon(1e-3));

  // independent cross-check: it must be a determinant zero too
  DispersionEvaluator ev(p);
  DispersionValue v = ev(mode.lambda);
  CHECK(std::abs(v.value) < 1e-5 * v.condition);
}
