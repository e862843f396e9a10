#include <cmath>
#include <functional>
#include <sstream>

#include "doctest.h"
#include "harvester/model.hpp"

using namespace harvester;

namespace {

// high-precision reference values for the default parameter set
// (m=J=E=G=L=Cp=R=1, S=0.3, k1=0.5, k2=2, CD=-0.1, CI=0.1)
constexpr double kA3 = 0.9766981117095218635317;
constexpr double kA4 = 0.0230368009626004959594;

bool code_of(Err expect, const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == expect;
  }
  return false;
}

}  // namespace

TEST_CASE("default parameters validate and cache D") {
  ValidatedParameters v = validate_parameters(default_parameters());
  CHECK(v.D == doctest::Approx(0.91).epsilon(1e-15));
  CHECK(v.p.CI == -v.p.CD);
}

TEST_CASE("derived constants match reference values") {
  ValidatedParameters v = validate_parameters(default_parameters());
  DerivedConstants d = derive_constants(v);
  CHECK(d.alpha == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.beta == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.gamma == doctest::Approx(0.91).epsilon(1e-15));
  CHECK(d.a1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.a2 == doctest::Approx(0.045).epsilon(1e-15));
  CHECK(d.a3 == doctest::Approx(kA3).epsilon(1e-15));
  CHECK(d.a4 == doctest::Approx(kA4).epsilon(1e-14));
  // L = 1, so the length-scaled constants coincide with the raw ones
  CHECK(d.c1 == d.a1 * v.p.L);
  CHECK(d.c3 == d.a3 * v.p.L);
}

TEST_CASE("boundary constants match reference values") {
  ValidatedParameters v = validate_parameters(default_parameters());
  DerivedConstants d = derive_constants(v);
  BoundaryConstants bc = boundary_constants(v, d);

  auto near = [](Cx got, Cx want, double tol = 1e-14) {
    return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
  };

  CHECK(near(bc.d1, Cx{1.008896950557088518373, -1.008896950557088518373}));
  CHECK(near(bc.dhat2, Cx{0.0, -0.1457941804066301954927}));
  CHECK(near(bc.d2, Cx{0.0, -1.889951933280154433396}));
  CHECK(near(bc.r11, Cx{4.0 / 3.0, 0.0}));
  CHECK(near(bc.rhat11, Cx{-0.0321988388475666548417, 0.0321988388475666548417}));
  CHECK(near(bc.rtilde11, Cx{0.0, 0.06082355975705196265579}));
  CHECK(near(bc.r12, Cx{0.12, 0.0}));
  CHECK(near(bc.rhat12, Cx{1.008896950557088518373, 0.94449927286195520869}));
  CHECK(near(bc.rhat13, Cx{0.94449927286195520869, 1.008896950557088518373}));
  CHECK(near(bc.r21, Cx{0.7155297521681478853712, 0.0}));
  CHECK(near(bc.r22, Cx{2.017793901114177036747, 0.0}));
  CHECK(near(bc.rhat22, Cx{0.0, -0.1246848653246198123657}));
  CHECK(near(bc.r23, Cx{1.88899854572391041738, 0.0}));
}

TEST_CASE("only dhat2 and d2 respond to piezo changes") {
  BeamParameters base = default_parameters();
  BeamParameters moved = base;
  moved.Cp = 0.7;
  moved.R = 1.9;
  moved.CD = -0.25;
  moved.CI = 0.25;

  ValidatedParameters vb = validate_parameters(base);
  ValidatedParameters vm = validate_parameters(moved);
  BoundaryConstants a = boundary_constants(vb, derive_constants(vb));
  BoundaryConstants b = boundary_constants(vm, derive_constants(vm));

  // bit-identical, not merely close: the invariance is exact
  CHECK(a.d1 == b.d1);
  CHECK(a.r11 == b.r11);
  CHECK(a.rhat11 == b.rhat11);
  CHECK(a.r12 == b.r12);
  CHECK(a.rhat12 == b.rhat12);
  CHECK(a.rhat13 == b.rhat13);
  CHECK(a.r21 == b.r21);
  CHECK(a.r22 == b.r22);
  CHECK(a.rhat22 == b.rhat22);
  CHECK(a.r23 == b.r23);

  // rtilde11's circuit term i*CI*CD/(k1*Cp) is the same one subtracted inside
  // d2 = d1^2 - dhat2, so it cancels: the assembled value is circuit-free even
  // though the defining formula carries the circuit symbols
  CHECK(std::abs(a.rtilde11 - b.rtilde11) < 1e-14);

  CHECK(a.dhat2 != b.dhat2);
  CHECK(a.d2 != b.d2);
}

TEST_CASE("validation rejects out-of-range parameters with specific codes") {
  BeamParameters p = default_parameters();

  p.m = 0.0;
  CHECK(code_of(Err::NonPositiveParameter, [&] { validate_parameters(p); }));

  p = default_parameters();
  p.S = 1.5;  // >= min(m, J)
  CHECK(code_of(Err::CouplingTooStrong, [&] { validate_parameters(p); }));

  p = default_parameters();
  p.CD = 0.2;  // must be negative
  CHECK(code_of(Err::NonPositiveParameter, [&] { validate_parameters(p); }));

  p = default_parameters();
  p.CI = -0.1;  // must be positive
  CHECK(code_of(Err::NonPositiveParameter, [&] { validate_parameters(p); }));
}

TEST_CASE("strictness flags") {
  BeamParameters p = default_parameters();
  p.CI = 0.11;  // not balanced
  Strictness s;
  s.require_balanced = true;
  CHECK(code_of(Err::BalancedPiezoViolated, [&] { validate_parameters(p, s); }));
  CHECK_NOTHROW(validate_parameters(p));  // fine without the flag

  p = default_parameters();
  p.k2 = 0.5;  // below sqrt(G*J) = 1
  Strictness b;
  b.require_branch1 = true;
  CHECK(code_of(Err::Branch1ConditionViolated, [&] { validate_parameters(p, b); }));
  CHECK_NOTHROW(validate_parameters(p));
}

TEST_CASE("parameter file parsing") {
  const char* good =
      "# reference set\n"
      "m = 1\nJ = 1\nS = 0.3\nE = 1\nG = 1\nL = 1\n"
      "k1 = 0.5\nk2 = 2\nCp = 1\nR = 1\nCD = -0.1\nCI = 0.1\n";
  std::istringstream in(good);
  BeamParameters p = parse_parameter_file(in);
  CHECK(p.S == 0.3);
  CHECK(p.k2 == 2.0);

  SUBCASE("missing key is named") {
    std::istringstream bad("m = 1\nJ = 1\n");
    try {
      parse_parameter_file(bad);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == Err::MissingKey);
      CHECK(std::string(e.what()).find('S') != std::string::npos);
    }
  }
  SUBCASE("unknown key rejected") {
    std::istringstream bad("m = 1\nbogus = 2\n");
    CHECK(code_of(Err::UnknownKey, [&] { parse_parameter_file(bad); }));
  }
  SUBCASE("duplicate key rejected") {
    std::istringstream bad("m = 1\nm = 2\n");
    CHECK(code_of(Err::BadValue, [&] { parse_parameter_file(bad); }));
  }
  SUBCASE("non-numeric value rejected") {
    std::istringstream bad("m = fast\n");
    CHECK(code_of(Err::BadValue, [&] { parse_parameter_file(bad); }));
  }
  SUBCASE("missing file") {
    CHECK(code_of(Err::BadValue, [] { load_parameter_file("/nonexistent/params"); }));
  }
}
