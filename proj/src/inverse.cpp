#include <algorithm>
#include <cmath>

#include "harvester/eigensolver.hpp"

namespace harvester {

namespace {

constexpr double kTailTol = 1e-8;      // spectral tail bound on quadrature error
constexpr double kMembershipTol = 1e-6;

// x-ascending values of int_0^x s over the state's own grid.
std::vector<Cx> cumulative(const cheb::Series& s, int n) {
  return s.antiderivative(Cx{0.0, 0.0}).values_on(n);
}

// Drop the unresolved (rounding-level) tail before differentiating: repeated
// derivatives amplify coefficient noise by ~K^2 per order, so the resolved
// length, not the grid size, must set K.
cheb::Series truncate_resolved(const cheb::Series& s) {
  const std::vector<Cx>& a = s.coeff();
  const int n = static_cast<int>(a.size());
  double peak = 0.0;
  for (Cx c : a) peak = std::max(peak, std::abs(c));
  if (peak == 0.0 || n <= 16) return s;
  // The fit of a resolved function ends in a rounding plateau whose level
  // depends on the grid size, so estimate it from the topmost coefficients
  // instead of using a fixed fraction of the peak; a cut below the plateau
  // keeps noise whose k-th mode differentiates to O(k^2) per order, while a
  // cut above it discards genuine content.
  const int probe = std::max(4, n / 8);
  double plateau = 0.0;
  for (int k = n - probe; k < n; ++k)
    plateau = std::max(plateau, std::abs(a[static_cast<std::size_t>(k)]));
  if (plateau > 1e-10 * peak) return s;  // no plateau reached: nothing provably noise
  const double thresh = std::max(8.0 * plateau, 1e-15 * peak);
  int keep = n;
  while (keep > 8 && std::abs(a[static_cast<std::size_t>(keep - 1)]) <= thresh) --keep;
  return s.truncated(keep);
}

double sup_abs(const std::vector<Cx>& v) {
  double m = 0.0;
  for (Cx z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

StateFunction apply_inverse(const StateFunction& g, const ValidatedParameters& vp) {
  const BeamParameters& p = vp.p;
  const int n = g.points();
  if (n < 8) fail(Err::GridTooCoarse, "inverse needs at least 8 grid points");
  if (std::abs(g.L - p.L) > 1e-14 * std::max(1.0, p.L))
    fail(Err::GridMismatch, "state length differs from beam length");

  const cheb::Series sg0 = component_series(g, 0);
  const cheb::Series sg1 = component_series(g, 1);
  const cheb::Series sg2 = component_series(g, 2);
  const cheb::Series sg3 = component_series(g, 3);

  // the Chebyshev tail bounds the truncation error of every integral below
  const int tail = std::max(4, n / 4);
  const double tail_err = std::max({sg0.tail_fraction(tail), sg1.tail_fraction(tail),
                                    sg2.tail_fraction(tail), sg3.tail_fraction(tail)});
  if (tail_err > kTailTol)
    fail(Err::GridTooCoarse, "input state is not resolved on this grid");

  // membership of g in the state space: g0(0) = g0'(0) = 0, g2(0) = 0
  const double scale0 = std::max(sup_abs(g.f0), 1e-30);
  const double scale2 = std::max(sup_abs(g.f2), 1e-30);
  if (std::abs(g.f0.front()) > kMembershipTol * scale0 ||
      std::abs(sg0.derivative().eval(0.0)) > kMembershipTol * scale0 / p.L ||
      std::abs(g.f2.front()) > kMembershipTol * scale2)
    fail(Err::BadArgument, "input state violates the left-end constraints");

  const Cx I{0.0, 1.0};
  StateFunction f = zero_state(n, p.L);

  for (int i = 0; i < n; ++i) {
    f.f1[static_cast<std::size_t>(i)] = I * g.f0[static_cast<std::size_t>(i)];
    f.f3[static_cast<std::size_t>(i)] = I * g.f2[static_cast<std::size_t>(i)];
  }

  const Cx g0pL = sg0.derivative().eval(p.L);
  const Cx g2L = g.f2.back();
  f.f4 = -I * p.Cp * p.R * (g.f4 + (p.CD / p.Cp) * g0pL);

  // bending deflection: iterated integrals of h = m g1 + S g3, outer two from
  // 0, inner two toward L, then the boundary-correction parabola
  std::vector<Cx> h(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    h[static_cast<std::size_t>(i)] = p.m * g.f1[static_cast<std::size_t>(i)] +
                                     p.S * g.f3[static_cast<std::size_t>(i)];
  std::vector<Cx> acc = cumulative(cheb::Series::fit(h, p.L), n);
  Cx at_end = acc.back();
  for (int i = 0; i < n; ++i)
    acc[static_cast<std::size_t>(i)] = at_end - acc[static_cast<std::size_t>(i)];
  acc = cumulative(cheb::Series::fit(acc, p.L), n);
  at_end = acc.back();
  for (int i = 0; i < n; ++i)
    acc[static_cast<std::size_t>(i)] = at_end - acc[static_cast<std::size_t>(i)];
  acc = cumulative(cheb::Series::fit(acc, p.L), n);
  acc = cumulative(cheb::Series::fit(acc, p.L), n);

  const Cx quad0 = I * (p.CI * p.CD * p.R - p.k1) / (2.0 * p.E) * g0pL +
                   I * (p.CI * p.Cp * p.R) / (2.0 * p.E) * g.f4;
  for (int i = 0; i < n; ++i) {
    const double x = g.grid[static_cast<std::size_t>(i)];
    f.f0[static_cast<std::size_t>(i)] =
        -(I / p.E) * acc[static_cast<std::size_t>(i)] + quad0 * x * x;
  }

  // torsion angle: double integral of S g1 + J g3, inner toward L, plus the
  // linear boundary correction
  std::vector<Cx> k(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    k[static_cast<std::size_t>(i)] = p.S * g.f1[static_cast<std::size_t>(i)] +
                                     p.J * g.f3[static_cast<std::size_t>(i)];
  std::vector<Cx> acc2 = cumulative(cheb::Series::fit(k, p.L), n);
  at_end = acc2.back();
  for (int i = 0; i < n; ++i)
    acc2[static_cast<std::size_t>(i)] = at_end - acc2[static_cast<std::size_t>(i)];
  acc2 = cumulative(cheb::Series::fit(acc2, p.L), n);

  const Cx lin2 = -I * (p.k2 / p.G) * g2L;
  for (int i = 0; i < n; ++i) {
    const double x = g.grid[static_cast<std::size_t>(i)];
    f.f2[static_cast<std::size_t>(i)] =
        -(I / p.G) * acc2[static_cast<std::size_t>(i)] + lin2 * x;
  }

  return f;
}

StateFunction apply_forward(const StateFunction& f, const ValidatedParameters& vp) {
  const BeamParameters& p = vp.p;
  const double Dq = vp.D;
  const int n = f.points();
  const Cx I{0.0, 1.0};

  const cheb::Series s0 = truncate_resolved(component_series(f, 0));
  const cheb::Series s2 = truncate_resolved(component_series(f, 2));
  const std::vector<Cx> d4 = s0.derivative().derivative().derivative().derivative().values_on(n);
  const std::vector<Cx> d2 = s2.derivative().derivative().values_on(n);

  StateFunction g = zero_state(n, p.L);
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    g.f0[k] = -I * f.f1[k];
    g.f1[k] = I * (p.E * p.J / Dq) * d4[k] + I * (p.G * p.S / Dq) * d2[k];
    g.f2[k] = -I * f.f3[k];
    g.f3[k] = -I * (p.E * p.S / Dq) * d4[k] - I * (p.G * p.m / Dq) * d2[k];
  }
  const Cx f1pL = truncate_resolved(component_series(f, 1)).derivative().eval(p.L);
  g.f4 = I * (p.CD / p.Cp) * f1pL + (I / (p.Cp * p.R)) * f.f4;
  return g;
}

PowerIterationResult inverse_power_iteration(const StateFunction& seed,
                                             const ValidatedParameters& p,
                                             int iterations) {
  auto dot = [](const StateFunction& a, const StateFunction& b) {
    Cx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.grid.size(); ++i)
      s += std::conj(a.f0[i]) * b.f0[i] + std::conj(a.f1[i]) * b.f1[i] +
           std::conj(a.f2[i]) * b.f2[i] + std::conj(a.f3[i]) * b.f3[i];
    return s + std::conj(a.f4) * b.f4;
  };

  StateFunction v = seed;
  {
    const double nv = std::sqrt(std::abs(dot(v, v)));
    if (nv == 0.0) fail(Err::BadArgument, "zero seed state");
    v = scaled(v, Cx{1.0 / nv, 0.0});
  }

  PowerIterationResult out;
  Cx lambda_prev{0.0, 0.0};
  for (int it = 1; it <= iterations; ++it) {
    StateFunction w = apply_inverse(v, p);
    const Cx mu = dot(v, w) / dot(v, v);  // dominant eigenvalue of A^{-1}
    if (std::abs(mu) == 0.0) fail(Err::NotConverged, "inverse annihilated the iterate");
    out.lambda = 1.0 / mu;
    out.iterations = it;
    out.drift = it > 1 ? std::abs(out.lambda - lambda_prev) / std::abs(out.lambda) : 1.0;
    lambda_prev = out.lambda;
    const double nw = std::sqrt(std::abs(dot(w, w)));
    v = scaled(w, Cx{1.0 / nw, 0.0});
  }
  return out;
}

}  // namespace harvester
