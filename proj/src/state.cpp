#include "harvester/state.hpp"

#include <cmath>
#include <stdexcept>

namespace harvester {

StateFunction zero_state(int n, double L) {
  if (n < 2) fail(Err::BadArgument, "state order must be at least 2");
  StateFunction f;
  f.L = L;
  f.grid = cheb::nodes(n, L);
  const std::size_t m = f.grid.size();
  f.f0.assign(m, Cx{0.0, 0.0});
  f.f1.assign(m, Cx{0.0, 0.0});
  f.f2.assign(m, Cx{0.0, 0.0});
  f.f3.assign(m, Cx{0.0, 0.0});
  f.f4 = Cx{0.0, 0.0};
  return f;
}

namespace {

// Random Chebyshev series with coefficients ~ (k+1)^{-4}; evaluated on the
// node grid after projecting out the left-end values requested.  Degree is
// capped below the grid size so the sampled values determine the polynomial
// exactly.
std::vector<Cx> random_component(int n, double L, int zero_value_orders,
                                 std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  // degree cap keeps the fourth-derivative roundtrip well above the
  // double-precision floor (differentiating T_k four times amplifies
  // coefficient rounding by ~k^7)
  const int K = std::min(n - 2, 16);
  std::vector<Cx> coeff(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) {
    const double decay = 1.0 / std::pow(k + 1.0, 4.0);
    coeff[static_cast<std::size_t>(k)] = decay * Cx{gauss(rng), gauss(rng)};
  }
  cheb::Series s(coeff, L);
  if (zero_value_orders >= 1) {
    // subtract value and (optionally) slope at x = 0 via an affine correction;
    // in the t = 1 - 2x/L variable this shifts only the T0 and T1 coefficients
    const Cx v0 = s.eval(0.0);
    Cx d0{0.0, 0.0};
    if (zero_value_orders >= 2) d0 = s.derivative().eval(0.0);
    std::vector<Cx> c = s.coeff();
    if (c.size() < 2) c.resize(2, Cx{0.0, 0.0});
    c[0] -= v0 + d0 * (L / 2.0);
    c[1] += d0 * (L / 2.0);
    s = cheb::Series(c, L);
  }
  return s.values_on(n);
}

}  // namespace

StateFunction random_admissible_state(int n, double L, std::mt19937_64& rng) {
  StateFunction f = zero_state(n, L);
  f.f0 = random_component(n, L, 2, rng);
  f.f1 = random_component(n, L, 0, rng);
  f.f2 = random_component(n, L, 1, rng);
  f.f3 = random_component(n, L, 0, rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  f.f4 = Cx{gauss(rng), gauss(rng)};
  return f;
}

cheb::Series component_series(const StateFunction& f, int comp) {
  const std::vector<Cx>* v = nullptr;
  switch (comp) {
    case 0: v = &f.f0; break;
    case 1: v = &f.f1; break;
    case 2: v = &f.f2; break;
    case 3: v = &f.f3; break;
    default: fail(Err::BadArgument, "component index must be 0..3");
  }
  return cheb::Series::fit(*v, f.L);
}

StateFunction& axpy(StateFunction& y, Cx a, const StateFunction& x) {
  if (y.grid.size() != x.grid.size() || y.L != x.L)
    fail(Err::GridMismatch, "state grids differ");
  for (std::size_t i = 0; i < y.grid.size(); ++i) {
    y.f0[i] += a * x.f0[i];
    y.f1[i] += a * x.f1[i];
    y.f2[i] += a * x.f2[i];
    y.f3[i] += a * x.f3[i];
  }
  y.f4 += a * x.f4;
  return y;
}

StateFunction scaled(const StateFunction& f, Cx a) {
  StateFunction g = f;
  for (std::size_t i = 0; i < g.grid.size(); ++i) {
    g.f0[i] *= a;
    g.f1[i] *= a;
    g.f2[i] *= a;
    g.f3[i] *= a;
  }
  g.f4 *= a;
  return g;
}

}  // namespace harvester
