#include "harvester/dispersion.hpp"

#include <cmath>

namespace harvester {

namespace {

constexpr double kSingularRel = 1e-12;

double row_norm_product(const Eigen::Matrix3cd& A) {
  double prod = 1.0;
  for (int r = 0; r < 3; ++r) prod *= A.row(r).cwiseAbs().sum();
  return prod;
}

Cx det3(const Eigen::Matrix3cd& M) {
  return M(0, 0) * (M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1)) -
         M(0, 1) * (M(1, 0) * M(2, 2) - M(1, 2) * M(2, 0)) +
         M(0, 2) * (M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0));
}

// Sum of the magnitudes of the six determinant expansion products: the scale
// against which cancellation in det3 must be judged.
double det3_scale(const Eigen::Matrix3cd& M) {
  auto a = [&](int r, int c) { return std::abs(M(r, c)); };
  return a(0, 0) * a(1, 1) * a(2, 2) + a(0, 1) * a(1, 2) * a(2, 0) +
         a(0, 2) * a(1, 0) * a(2, 1) + a(0, 0) * a(1, 2) * a(2, 1) +
         a(0, 1) * a(1, 0) * a(2, 2) + a(0, 2) * a(1, 1) * a(2, 0);
}

// Closed-form adjugate-over-determinant inverse.
Eigen::Matrix3cd inverse3(const Eigen::Matrix3cd& A, Cx det) {
  Eigen::Matrix3cd adj;
  adj(0, 0) = A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
  adj(0, 1) = A(0, 2) * A(2, 1) - A(0, 1) * A(2, 2);
  adj(0, 2) = A(0, 1) * A(1, 2) - A(0, 2) * A(1, 1);
  adj(1, 0) = A(1, 2) * A(2, 0) - A(1, 0) * A(2, 2);
  adj(1, 1) = A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0);
  adj(1, 2) = A(0, 2) * A(1, 0) - A(0, 0) * A(1, 2);
  adj(2, 0) = A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0);
  adj(2, 1) = A(0, 1) * A(2, 0) - A(0, 0) * A(2, 1);
  adj(2, 2) = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  return adj / det;
}

Cx chat_coefficient(Cx lambda, const BeamParameters& p) {
  const Cx i(0.0, 1.0);
  return i * p.k1 - (p.CI * p.CD / p.Cp) / (lambda - i / (p.Cp * p.R));
}

}  // namespace

LeftReflection left_reflection_matrix(const CharacteristicRoots& roots) {
  const Cx z1 = roots.zeta[0], z3 = roots.zeta[2], z5 = roots.zeta[4];
  Eigen::Matrix3cd A1;
  A1 << 1.0, 1.0, 1.0,
        z1, z3, z5,
        z1 * z1 * z1 * z1, z3 * z3 * z3 * z3, z5 * z5 * z5 * z5;
  const Cx det = det3(A1);
  if (std::abs(det) < kSingularRel * row_norm_product(A1))
    fail(Err::SingularA1, "left boundary system is singular (degenerate roots)");
  const Eigen::Matrix3cd A1inv = inverse3(A1, det);

  // B2 has only row two nonzero (the zeta row), so A1^{-1} B2 is the outer
  // product of A1^{-1}'s second column with that row.
  Eigen::Matrix3cd R1 = -Eigen::Matrix3cd::Identity();
  const Cx zr[3] = {z1, z3, z5};
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) R1(j, k) += 2.0 * A1inv(j, 1) * zr[k];
  return {R1, det};
}

RightReflection right_reflection_scaled(Cx lambda, const CharacteristicRoots& roots,
                                        const ValidatedParameters& vp, double pole_radius) {
  const auto& p = vp.p;
  const Cx i(0.0, 1.0);
  const Cx pole(0.0, 1.0 / (p.Cp * p.R));
  if (std::abs(lambda - pole) < pole_radius)
    fail(Err::PoleProximity, "lambda inside the exclusion disk of the circuit pole");

  const Cx ch = chat_coefficient(lambda, p);
  const Cx l2 = lambda * lambda, l3 = l2 * lambda;
  Eigen::Matrix3cd A3, B4;
  const Cx zr[3] = {roots.zeta[0], roots.zeta[2], roots.zeta[4]};
  for (int j = 0; j < 3; ++j) {
    const Cx z = zr[j];
    const Cx z2 = z * z, z3 = z2 * z, z4 = z2 * z2, z5 = z4 * z;
    A3(0, j) = z3;
    A3(1, j) = p.E * z2 + ch * lambda * z;
    A3(2, j) = p.E * p.G * z5 + i * p.E * p.k2 * lambda * z4 - p.G * p.m * l2 * z -
               i * p.m * p.k2 * l3;
    B4(0, j) = 0.0;
    B4(1, j) = p.E * z2;
    B4(2, j) = i * p.E * p.k2 * lambda * z4 - i * p.m * p.k2 * l3;
  }
  const Cx det = det3(A3);
  if (std::abs(det) < kSingularRel * row_norm_product(A3))
    fail(Err::SingularA3, "right boundary system is singular");

  const Eigen::Matrix3cd B3 = A3 - 2.0 * B4;
  const Eigen::Matrix3cd M = inverse3(A3, det) * B3;

  const Cx e5_inv = std::exp(-zr[2] * p.L);
  Eigen::Vector3cd dg(1.0, 1.0, e5_inv);
  RightReflection out;
  out.R2_scaled = dg.asDiagonal() * M * dg.asDiagonal();
  out.detA3 = det;
  out.e5_inv = e5_inv;
  return out;
}

DispersionEvaluator::DispersionEvaluator(const ValidatedParameters& p)
    : p_(p), d_(derive_constants(p)) {}

ReflectionAssembly DispersionEvaluator::assemble(Cx lambda) const {
  const auto roots = characteristic_roots_exact(lambda, d_);
  auto left = left_reflection_matrix(roots);
  auto right = right_reflection_scaled(lambda, roots, p_);
  ReflectionAssembly a;
  a.lambda = lambda;
  a.R1 = left.R1;
  a.R2_scaled = right.R2_scaled;
  a.e1 = std::exp(roots.zeta[0] * p_.p.L);
  a.e3 = std::exp(roots.zeta[2] * p_.p.L);
  a.e5_inv = right.e5_inv;
  a.detA1 = left.detA1;
  a.detA3 = right.detA3;
  return a;
}

DispersionValue DispersionEvaluator::operator()(Cx lambda) const {
  if (lambda == Cx(0.0)) fail(Err::BadArgument, "dispersion needs lambda != 0");
  const auto a = assemble(lambda);
  Eigen::Vector3cd et(a.e1, a.e3, 1.0);
  Eigen::Matrix3cd M = et.asDiagonal() * a.R1 * et.asDiagonal() - a.R2_scaled;
  DispersionValue v;
  v.lambda = lambda;
  v.value = det3(M);
  v.condition = det3_scale(M);
  v.near_pole = std::abs(lambda - pole()) < 10.0 * kPoleRadius;
  return v;
}

DispersionValue dispersion_function(Cx lambda, const ValidatedParameters& p) {
  return DispersionEvaluator(p)(lambda);
}

}  // namespace harvester
