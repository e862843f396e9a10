#pragma once

#include <array>
#include <utility>

#include "harvester/model.hpp"

namespace harvester {

enum class RootKind { Exact, Asymptotic };

// The six exponents zeta for which e^{zeta x} solves the spectral ODE at a
// fixed lambda. Sign pairs are stored adjacently: zeta[1] = -zeta[0],
// zeta[3] = -zeta[2], zeta[5] = -zeta[4]. The pair representatives follow the
// large-lambda families
//   zeta[0] ~ +i a1 lambda,  zeta[2] ~ +i a3 lambda^{1/2},  zeta[4] ~ +a3 lambda^{1/2},
// so downstream rescaling can rely on which exponentials decay where.
struct CharacteristicRoots {
  Cx lambda;
  std::array<Cx, 6> zeta;
  RootKind kind = RootKind::Exact;
  double label_confidence = 1.0;
  bool degenerate = false;  // two cubic roots closer than 1e-8 relative
};

// Coefficients (p, q) of z^3 + p z + q = 0, z = zeta^2 + (alpha/3) lambda^2.
std::pair<Cx, Cx> depressed_cubic_coefficients(Cx lambda, const DerivedConstants& d);

// Cardano roots ordered by the principal-branch construction: z1 from the
// principal cube roots, z2/z3 through the exp(+-i 2pi/3) rotations. Falls back
// to companion-matrix eigenvalues near discriminant degeneracies, keeping the
// Cardano ordering.
std::array<Cx, 3> solve_depressed_cubic(Cx p, Cx q);

CharacteristicRoots characteristic_roots_exact(Cx lambda, const DerivedConstants& d);

// First-order expansions with the principal branch of lambda^{1/2}:
//   zeta_1,2 = +-i a1 lambda [1 + (a2/a1) lambda^{-2}]
//   zeta_3,4 = +-i a3 lambda^{1/2} [1 - (a4/a3) lambda^{-1}]
//   zeta_5,6 = +-  a3 lambda^{1/2} [1 + (a4/a3) lambda^{-1}]
// Refuses |lambda| < floor rather than extrapolate.
CharacteristicRoots characteristic_roots_asymptotic(Cx lambda, const DerivedConstants& d,
                                                    double min_abs_lambda = 1.0);

}  // namespace harvester
