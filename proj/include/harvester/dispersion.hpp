#pragma once

#include <Eigen/Dense>

#include "harvester/charroots.hpp"
#include "harvester/model.hpp"

namespace harvester {

// Everything assembled at one lambda. R2_scaled is
// diag(1,1,e5_inv) * A3^{-1} B3 * diag(1,1,e5_inv), so together with
// E~ = diag(e1,e3,1) applied around R1 only bounded exponentials remain in the
// upper half plane.
struct ReflectionAssembly {
  Cx lambda;
  Eigen::Matrix3cd R1;
  Eigen::Matrix3cd R2_scaled;
  Cx e1, e3, e5_inv;
  Cx detA1, detA3;
};

struct DispersionValue {
  Cx lambda;
  Cx value;          // det of the rescaled difference matrix
  double condition;  // magnitude scale of the 3x3 determinant expansion
  bool near_pole;    // within 10x the exclusion radius of i/(Cp R)
};

struct LeftReflection {
  Eigen::Matrix3cd R1;
  Cx detA1;
};

struct RightReflection {
  Eigen::Matrix3cd R2_scaled;
  Cx detA3;
  Cx e5_inv;
};

// radius of the disk excluded around the circuit pole i/(Cp R)
inline constexpr double kPoleRadius = 1e-2;

LeftReflection left_reflection_matrix(const CharacteristicRoots& roots);

RightReflection right_reflection_scaled(Cx lambda, const CharacteristicRoots& roots,
                                        const ValidatedParameters& p,
                                        double pole_radius = kPoleRadius);

// Caches the derived constants; evaluation itself is pure and thread-safe.
class DispersionEvaluator {
 public:
  explicit DispersionEvaluator(const ValidatedParameters& p);

  DispersionValue operator()(Cx lambda) const;
  ReflectionAssembly assemble(Cx lambda) const;

  Cx pole() const { return Cx(0.0, 1.0 / (p_.p.Cp * p_.p.R)); }
  double pole_radius() const { return kPoleRadius; }
  const ValidatedParameters& params() const { return p_; }
  const DerivedConstants& derived() const { return d_; }

 private:
  ValidatedParameters p_;
  DerivedConstants d_;
};

DispersionValue dispersion_function(Cx lambda, const ValidatedParameters& p);

}  // namespace harvester
