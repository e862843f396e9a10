#pragma once

#include <vector>

#include "harvester/types.hpp"

namespace harvester::cheb {

// Gauss-Lobatto nodes ascending on [0, L]: x_j = (L/2)(1 - cos(j pi/(n-1))).
std::vector<double> nodes(int n, double L);

// Clenshaw-Curtis weights on those nodes; integrates every polynomial of
// degree <= n-1 exactly over [0, L]. All weights positive.
std::vector<double> quadrature_weights(int n, double L);

// Chebyshev-T series in t = 1 - 2x/L (so x=0 maps to t=1). Degree = size-1.
// The interpolant of values given on nodes(n, L) has exactly n coefficients.
class Series {
 public:
  Series() = default;
  Series(std::vector<Cx> coeff, double L);

  // Interpolate values sampled on nodes(values.size(), L).
  static Series fit(const std::vector<Cx>& values, double L);

  int size() const { return static_cast<int>(a_.size()); }
  double length() const { return L_; }
  const std::vector<Cx>& coeff() const { return a_; }

  Cx eval(double x) const;
  std::vector<Cx> values() const;  // on nodes(size(), L)
  std::vector<Cx> values_on(int n) const;

  Series derivative() const;                     // d/dx
  Series antiderivative(Cx value_at_zero) const;  // F' = this, F(0) = value_at_zero
  Cx definite_integral() const;                  // over [0, L]

  // Magnitude of the trailing `tail` coefficients relative to the whole
  // series; the resolution gauge used by grid-coarseness checks.
  double tail_fraction(int tail) const;

  Series truncated(int n) const;

 private:
  std::vector<Cx> a_;
  double L_ = 1.0;
};

}  // namespace harvester::cheb
