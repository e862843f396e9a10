#pragma once

#include <random>
#include <vector>

#include "harvester/chebyshev.hpp"
#include "harvester/types.hpp"

namespace harvester {

// Five-component state sampled on cheb::nodes(n, L); f4 is the scalar
// circuit coordinate.  Components are stored as node values so that the
// same object serves collocation, the explicit inverse, and the energy
// functionals; fit a Series when derivatives are needed.
struct StateFunction {
  double L = 1.0;
  std::vector<double> grid;  // cheb::nodes(points(), L)
  std::vector<Cx> f0, f1, f2, f3;
  Cx f4{0.0, 0.0};

  int points() const { return static_cast<int>(grid.size()); }
};

// n = number of grid points.
StateFunction zero_state(int n, double L);

// Smooth random state satisfying the left-end constraints
// f0(0) = f0'(0) = 0 and f2(0) = 0 exactly.  Chebyshev coefficients decay
// like (k+1)^{-4}, so second derivatives are well resolved at moderate n.
StateFunction random_admissible_state(int n, double L, std::mt19937_64& rng);

// Chebyshev fit of one component (comp in 0..3).
cheb::Series component_series(const StateFunction& f, int comp);

StateFunction& axpy(StateFunction& y, Cx a, const StateFunction& x);  // y += a*x
StateFunction scaled(const StateFunction& f, Cx a);

}  // namespace harvester
