#include "harvester/chebyshev.hpp"

#include <cmath>

namespace harvester::cheb {

std::vector<double> nodes(int n, double L) {
  if (n < 2) fail(Err::BadArgument, "need at least 2 nodes");
  std::vector<double> x(n);
  const int N = n - 1;
  for (int j = 0; j <= N; ++j) x[j] = 0.5 * L * (1.0 - std::cos(M_PI * j / N));
  x[0] = 0.0;
  x[N] = L;
  return x;
}

std::vector<double> quadrature_weights(int n, double L) {
  if (n < 2) fail(Err::BadArgument, "need at least 2 nodes");
  const int N = n - 1;
  std::vector<double> w(n, 0.0);
  // w_j = (L/2) * sum over even k of (2/(1-k^2)) * fit-matrix(k, j)
  for (int j = 0; j <= N; ++j) {
    const double cj = (j == 0 || j == N) ? 2.0 : 1.0;
    double s = 0.0;
    for (int k = 0; k <= N; k += 2) {
      const double ck = (k == 0 || k == N) ? 2.0 : 1.0;
      const double ik = 2.0 / (1.0 - double(k) * k);  // integral of T_k on [-1,1]
      s += ik * (2.0 / (N * ck * cj)) * std::cos(M_PI * j * k / N);
    }
    w[j] = 0.5 * L * s;
  }
  return w;
}

Series::Series(std::vector<Cx> coeff, double L) : a_(std::move(coeff)), L_(L) {
  if (a_.empty()) fail(Err::BadArgument, "empty series");
}

Series Series::fit(const std::vector<Cx>& values, double L) {
  const int n = static_cast<int>(values.size());
  if (n < 2) fail(Err::BadArgument, "need at least 2 values");
  const int N = n - 1;
  std::vector<Cx> a(n);
  for (int k = 0; k <= N; ++k) {
    const double ck = (k == 0 || k == N) ? 2.0 : 1.0;
    Cx s = 0.0;
    for (int j = 0; j <= N; ++j) {
      const double cj = (j == 0 || j == N) ? 2.0 : 1.0;
      s += values[j] / cj * std::cos(M_PI * j * k / N);
    }
    a[k] = 2.0 / (N * ck) * s;
  }
  return Series(std::move(a), L);
}

Cx Series::eval(double x) const {
  const double t = 1.0 - 2.0 * x / L_;
  // Clenshaw recurrence
  Cx b1 = 0.0, b2 = 0.0;
  for (int k = size() - 1; k >= 1; --k) {
    Cx b0 = a_[k] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return a_[0] + t * b1 - b2;
}

std::vector<Cx> Series::values() const { return values_on(size()); }

std::vector<Cx> Series::values_on(int n) const {
  auto x = nodes(n, L_);
  std::vector<Cx> v(n);
  for (int j = 0; j < n; ++j) v[j] = eval(x[j]);
  return v;
}

Series Series::derivative() const {
  const int N = size() - 1;
  // d_{k-1} = d_{k+1} + 2k a_k descending, then halve d_0
  std::vector<Cx> d(N + 1, 0.0);
  for (int k = N; k >= 1; --k) {
    Cx above = (k + 1 <= N - 1) ? d[k + 1] : Cx(0.0);
    d[k - 1] = above + 2.0 * double(k) * a_[k];
  }
  d[0] *= 0.5;
  d.resize(std::max(1, N));
  const double scale = -2.0 / L_;  // dt/dx
  for (auto& v : d) v *= scale;
  return Series(std::move(d), L_);
}

Series Series::antiderivative(Cx value_at_zero) const {
  const int N = size() - 1;
  std::vector<Cx> A(N + 2, 0.0);
  auto a = [&](int k) -> Cx { return (k >= 0 && k <= N) ? a_[k] : Cx(0.0); };
  A[1] = a(0) - 0.5 * a(2);
  for (int k = 2; k <= N + 1; ++k) A[k] = (a(k - 1) - a(k + 1)) / (2.0 * k);
  // integral in t; x-antiderivative needs dx = (-L/2) dt
  for (int k = 1; k <= N + 1; ++k) A[k] *= -0.5 * L_;
  // fix constant: value at x=0 is t=1 where every T_k is 1
  Cx at0 = 0.0;
  for (int k = 1; k <= N + 1; ++k) at0 += A[k];
  A[0] = value_at_zero - at0;
  return Series(std::move(A), L_);
}

Cx Series::definite_integral() const {
  Series F = antiderivative(0.0);
  return F.eval(L_);
}

double Series::tail_fraction(int tail) const {
  double total = 0.0, tl = 0.0;
  const int n = size();
  tail = std::min(tail, n);
  for (int k = 0; k < n; ++k) {
    double m = std::abs(a_[k]);
    total += m;
    if (k >= n - tail) tl += m;
  }
  return total > 0.0 ? tl / total : 0.0;
}

Series Series::truncated(int n) const {
  if (n >= size()) return *this;
  std::vector<Cx> a(a_.begin(), a_.begin() + std::max(1, n));
  return Series(std::move(a), L_);
}

}  // namespace harvester::cheb
