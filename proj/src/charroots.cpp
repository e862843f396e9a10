#include "harvester/charroots.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace harvester {

namespace {

constexpr double kDegenerateRel = 1e-8;

Cx principal_cbrt(Cx z) { return z == Cx(0.0) ? Cx(0.0) : std::pow(z, 1.0 / 3.0); }

double cubic_residual_scale(Cx p, Cx q) {
  return std::max(std::pow(std::abs(p), 1.5), std::abs(q));
}

std::array<Cx, 3> cardano(Cx p, Cx q) {
  if (p == Cx(0.0) && q == Cx(0.0)) return {Cx(0.0), Cx(0.0), Cx(0.0)};
  const Cx s = std::sqrt(0.25 * q * q + p * p * p / 27.0);
  // u = -q/2 + s and v = q/2 + s satisfy u*v = p^3/27; pick the better
  // conditioned one to avoid cancellation when s is close to +-q/2.
  Cx u = -0.5 * q + s;
  Cx v = 0.5 * q + s;
  if (std::abs(u) < 1e-2 * std::abs(v)) u = (p * p * p / 27.0) / v;

  Cx zhat1, ztilde1;
  if (u != Cx(0.0)) {
    zhat1 = principal_cbrt(u);
    ztilde1 = p / (3.0 * zhat1);  // cube root of v paired so zhat1*ztilde1 = p/3
  } else {
    zhat1 = Cx(0.0);
    ztilde1 = principal_cbrt(v);
  }
  const Cx rot(-0.5, std::sqrt(3.0) / 2.0);  // e^{i 2pi/3}
  const Cx roti = std::conj(rot);
  std::array<Cx, 3> z;
  Cx zh = zhat1, zt = ztilde1;
  for (int j = 0; j < 3; ++j) {
    z[j] = zh - zt;
    zh *= rot;
    zt *= roti;
  }
  return z;
}

std::array<Cx, 3> companion_roots(Cx p, Cx q) {
  Eigen::Matrix3cd C = Eigen::Matrix3cd::Zero();
  C(0, 2) = -q;
  C(1, 0) = 1.0;
  C(1, 2) = -p;
  C(2, 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(C, false);
  auto ev = es.eigenvalues();
  return {ev(0), ev(1), ev(2)};
}

// Reorder `cand` to minimize total distance to `ref` (all six permutations).
std::array<Cx, 3> match_order(const std::array<Cx, 3>& cand, const std::array<Cx, 3>& ref) {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  double best = std::numeric_limits<double>::infinity();
  std::array<Cx, 3> out = cand;
  for (const auto& pm : perms) {
    double tot = 0.0;
    for (int j = 0; j < 3; ++j) tot += std::abs(cand[pm[j]] - ref[j]);
    if (tot < best) {
      best = tot;
      out = {cand[pm[0]], cand[pm[1]], cand[pm[2]]};
    }
  }
  return out;
}

// Pair representatives of the large-lambda families; used for labeling at any
// lambda (as a guide, it need only separate the three families).
std::array<Cx, 3> asymptotic_representatives(Cx lambda, const DerivedConstants& d) {
  const Cx i(0.0, 1.0);
  const Cx rt = std::sqrt(lambda);
  return {
      i * d.a1 * lambda * (1.0 + (d.a2 / d.a1) / (lambda * lambda)),
      i * d.a3 * rt * (1.0 - (d.a4 / d.a3) / lambda),
      d.a3 * rt * (1.0 + (d.a4 / d.a3) / lambda),
  };
}

}  // namespace

std::pair<Cx, Cx> depressed_cubic_coefficients(Cx lambda, const DerivedConstants& d) {
  const Cx l2 = lambda * lambda;
  const Cx p = -(d.alpha * d.alpha / 3.0) * l2 * l2 - d.beta * l2;
  const Cx q = (2.0 / 27.0) * d.alpha * d.alpha * d.alpha * l2 * l2 * l2 +
               (d.alpha * d.beta / 3.0 - d.gamma) * l2 * l2;
  return {p, q};
}

std::array<Cx, 3> solve_depressed_cubic(Cx p, Cx q) {
  auto z = cardano(p, q);
  const double scale = cubic_residual_scale(p, q);
  double worst = 0.0;
  for (const Cx& r : z) worst = std::max(worst, std::abs(r * r * r + p * r + q));
  if (scale > 0.0 && worst > 1e-13 * scale) {
    // Cardano branch choices degrade near double roots; the companion matrix
    // does not care. Keep Cardano's ordering.
    z = match_order(companion_roots(p, q), z);
  }
  return z;
}

CharacteristicRoots characteristic_roots_exact(Cx lambda, const DerivedConstants& d) {
  if (lambda == Cx(0.0)) fail(Err::BadArgument, "characteristic roots need lambda != 0");
  const auto [p, q] = depressed_cubic_coefficients(lambda, d);
  auto z = solve_depressed_cubic(p, q);

  const Cx shift = (d.alpha / 3.0) * lambda * lambda;
  const auto pred = asymptotic_representatives(lambda, d);
  std::array<Cx, 3> zpred;
  for (int j = 0; j < 3; ++j) zpred[j] = pred[j] * pred[j] + shift;
  z = match_order(z, zpred);

  CharacteristicRoots out;
  out.lambda = lambda;
  out.kind = RootKind::Exact;

  double zmax = 0.0, pair_gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    zmax = std::max(zmax, std::abs(z[a]));
    for (int b = a + 1; b < 3; ++b) pair_gap = std::min(pair_gap, std::abs(z[a] - z[b]));
  }
  if (pair_gap < kDegenerateRel * zmax) {
    out.degenerate = true;
    out.label_confidence = 0.5;
  }

  for (int j = 0; j < 3; ++j) {
    Cx zeta = std::sqrt(z[j] - shift);
    if (std::abs(zeta - pred[j]) > std::abs(zeta + pred[j])) zeta = -zeta;
    out.zeta[2 * j] = zeta;
    out.zeta[2 * j + 1] = -zeta;
  }
  return out;
}

CharacteristicRoots characteristic_roots_asymptotic(Cx lambda, const DerivedConstants& d,
                                                    double min_abs_lambda) {
  if (std::abs(lambda) < min_abs_lambda)
    fail(Err::BadArgument, "asymptotic root expansion needs |lambda| >= floor");
  const auto pred = asymptotic_representatives(lambda, d);
  CharacteristicRoots out;
  out.lambda = lambda;
  out.kind = RootKind::Asymptotic;
  for (int j = 0; j < 3; ++j) {
    out.zeta[2 * j] = pred[j];
    out.zeta[2 * j + 1] = -pred[j];
  }
  return out;
}

}  // namespace harvester
