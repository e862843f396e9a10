#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "harvester/eigensolver.hpp"

namespace harvester {

namespace {

using Mat = Eigen::Matrix<Cx, Eigen::Dynamic, Eigen::Dynamic>;  // column-major

// The five-component pencil is assembled on the Chebyshev coefficients of the
// degree-(N-1) interpolant rather than on nodal values: nodal fourth-derivative
// matrices grow like N^8 and drown the eigensolver in rounding noise beyond
// N ~ 50, while the coefficient-space derivative and basis-conversion operators
// stay O(N), so accuracy is set by the eigenvalue's own conditioning at every
// grid size.  Derivatives land in the ultraspherical bases C^(k); equation rows
// are tested there (tau form) and the trailing rows freed by the order drop
// hold the boundary conditions.

// d^k/dx^k of T_j expressed in C^(k): T_j' = j C^1_{j-1}, and each further
// derivative multiplies by 2m and shifts (C^m_i' = 2m C^{m+1}_{i-1}).
Mat coeff_derivative(int k, int N, double sigma) {
  Mat D = Mat::Zero(N, N);
  double lead = 1.0;
  for (int m = 1; m < k; ++m) lead *= 2.0 * m;
  const double s = std::pow(sigma, k) * lead;
  for (int i = 0; i + k < N; ++i) D(i, i + k) = s * static_cast<double>(i + k);
  return D;
}

// T -> C^1: T_0 = C_0, T_j = (C_j - C_{j-2})/2.
Mat convert_T_to_C1(int N) {
  Mat S = Mat::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    S(i, i) = i == 0 ? 1.0 : 0.5;
    if (i + 2 < N) S(i, i + 2) = -0.5;
  }
  return S;
}

// C^m -> C^(m+1): C^m_j = m/(m+j) (C^{m+1}_j - C^{m+1}_{j-2}).
Mat convert_up(int m, int N) {
  Mat S = Mat::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    S(i, i) = static_cast<double>(m) / (m + i);
    if (i + 2 < N) S(i, i + 2) = -static_cast<double>(m) / (m + i + 2);
  }
  return S;
}

// row functional: k-th derivative of T_j at the right (sign=+1) or left
// (sign=-1) end of [0,L]; T_j^(k)(1) = prod_{r<k} (j^2-r^2)/(2r+1)
Eigen::RowVectorXd end_functional(int k, int sign, int N, double sigma) {
  Eigen::RowVectorXd row(N);
  for (int j = 0; j < N; ++j) {
    double v = 1.0;
    for (int r = 0; r < k; ++r)
      v *= static_cast<double>(j) * j - static_cast<double>(r) * r;
    for (int r = 0; r < k; ++r) v /= 2.0 * r + 1.0;
    if (sign < 0 && (j + k) % 2 != 0) v = -v;
    row(j) = v * std::pow(sigma, k);
  }
  return row;
}

struct Pencil {
  Mat A;
  Mat B;
};

// Unknowns [a0; a1; a2; a3; f4] of length 4N+1: four coefficient vectors and
// the circuit charge.  Blocks 0 and 2 are the exact T-space identities
// -i a1 = lambda a0 and -i a3 = lambda a2; blocks 1 and 3 are the momentum
// equations tested in C^4, short four and two rows, with the six boundary
// conditions filling the gap.
Pencil assemble_pencil(const ValidatedParameters& vp, int N) {
  const BeamParameters& p = vp.p;
  const double Dq = vp.D;
  const double sigma = 2.0 / p.L;  // [0,L] -> [-1,1] chain factor
  const int n_tot = 4 * N + 1;
  const int i4 = 4 * N;
  const Cx I{0.0, 1.0};

  const Mat D2 = coeff_derivative(2, N, sigma);
  const Mat D4 = coeff_derivative(4, N, sigma);
  const Mat S0 = convert_T_to_C1(N);
  const Mat S1 = convert_up(1, N);
  const Mat S2 = convert_up(2, N);
  const Mat S3 = convert_up(3, N);
  const Mat T_to_C4 = S3 * S2 * S1 * S0;   // identity term, T tested in C^4
  const Mat D2_in_C4 = S3 * S2 * D2;       // second derivative raised to C^4

  const Eigen::RowVectorXd val0 = end_functional(0, -1, N, sigma);
  const Eigen::RowVectorXd der0 = end_functional(1, -1, N, sigma);
  const Eigen::RowVectorXd valL = end_functional(0, +1, N, sigma);
  const Eigen::RowVectorXd derL = end_functional(1, +1, N, sigma);
  const Eigen::RowVectorXd der2L = end_functional(2, +1, N, sigma);
  const Eigen::RowVectorXd der3L = end_functional(3, +1, N, sigma);

  Pencil pc{Mat::Zero(n_tot, n_tot), Mat::Zero(n_tot, n_tot)};
  Mat& A = pc.A;
  Mat& B = pc.B;

  for (int i = 0; i < N; ++i) {
    A(i, N + i) = -I;              // -i f1 = lambda f0
    B(i, i) = 1.0;
    A(2 * N + i, 3 * N + i) = -I;  // -i f3 = lambda f2
    B(2 * N + i, 2 * N + i) = 1.0;
  }

  // bending momentum: i(EJ/D) f0'''' + i(GS/D) f2'' = lambda f1
  for (int i = 0; i < N - 4; ++i) {
    for (int j = 0; j < N; ++j) {
      A(N + i, j) = I * (p.E * p.J / Dq) * D4(i, j);
      A(N + i, 2 * N + j) = I * (p.G * p.S / Dq) * D2_in_C4(i, j);
      B(N + i, N + j) = T_to_C4(i, j);
    }
  }
  // torsion momentum: -i(ES/D) f0'''' - i(Gm/D) f2'' = lambda f3
  for (int i = 0; i < N - 2; ++i) {
    for (int j = 0; j < N; ++j) {
      A(3 * N + i, j) = -I * (p.E * p.S / Dq) * D4(i, j);
      A(3 * N + i, 2 * N + j) = -I * (p.G * p.m / Dq) * D2_in_C4(i, j);
      B(3 * N + i, 3 * N + j) = T_to_C4(i, j);
    }
  }

  // clamped left end, shear-free right end, balanced bending moment
  for (int j = 0; j < N; ++j) {
    A(2 * N - 4, j) = val0(j);                    // f0(0) = 0
    A(2 * N - 3, j) = der0(j);                    // f0'(0) = 0
    A(2 * N - 2, j) = der3L(j);                   // f0'''(L) = 0
    A(2 * N - 1, j) = p.E * der2L(j);             // E f0''(L)
    A(2 * N - 1, N + j) = p.k1 * derL(j);         //   + k1 f1'(L)
    A(4 * N - 2, 2 * N + j) = val0(j);            // f2(0) = 0
    A(4 * N - 1, 2 * N + j) = p.G * derL(j);      // G f2'(L)
    A(4 * N - 1, 3 * N + j) = p.k2 * valL(j);     //   + k2 f3(L)
  }
  A(2 * N - 1, i4) = p.CI;  // + CI f4 = 0

  // circuit: i(CD/Cp) f1'(L) + i/(CpR) f4 = lambda f4
  for (int j = 0; j < N; ++j) A(i4, N + j) = I * (p.CD / p.Cp) * derL(j);
  A(i4, i4) = I / (p.Cp * p.R);
  B(i4, i4) = 1.0;

  // row equilibration: eigenvalue-preserving left scaling that levels the
  // boundary functionals (~N^6) against the O(N) interior rows before the
  // factorization of A
  for (int r = 0; r < n_tot; ++r) {
    double s = 0.0;
    for (int c = 0; c < n_tot; ++c)
      s = std::max({s, std::abs(A(r, c)), std::abs(B(r, c))});
    if (s > 0.0) {
      A.row(r) /= s;
      B.row(r) /= s;
    }
  }
  return pc;
}

struct GeneralizedEigen {
  std::vector<Cx> values;
  Mat vectors;  // empty unless requested
};

// Solved by zero-shift inversion rather than QZ on (A, B): inside each tau row
// the stiffness entries grow like N while the identity-term entries decay like
// N^-3, so any one-sided scaling leaves lambda's coupling buried ~N^4 below the
// row norm and QZ loses digits with every refinement.  A itself is nonsingular
// (zero lies in the resolvent set), and the standard eigenvalues mu of A^{-1}B
// put the wanted low modes at the TOP of the spectrum as mu = 1/lambda, where
// the QR iteration's eps*||M|| backward error costs only ~eps*|lambda|^2
// forward error.  The infinite eigenvalues raised by the boundary rows pile up
// near mu = 0 and map harmlessly past the magnitude cap.
GeneralizedEigen solve_pencil(const Pencil& pc, bool with_vectors) {
  const lapack_int n = static_cast<lapack_int>(pc.A.rows());
  Mat M = Eigen::PartialPivLU<Mat>(pc.A).solve(pc.B);
  std::vector<Cx> mu(static_cast<std::size_t>(n));
  Mat vr;
  if (with_vectors) vr.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', with_vectors ? 'V' : 'N', n, M.data(), n, mu.data(),
      nullptr, 1, with_vectors ? vr.data() : nullptr, with_vectors ? n : 1);
  if (info != 0) fail(Err::NotConverged, "eigensolver failed");

  GeneralizedEigen out;
  if (with_vectors) out.vectors = std::move(vr);
  out.values.assign(mu.size(), Cx{});
  for (std::size_t k = 0; k < mu.size(); ++k) {
    // A^{-1}B x = mu x  <=>  A x = (1/mu) B x, with the same right vectors
    out.values[k] = Cx{1.0, 0.0} / mu[k];
  }
  return out;
}

bool finite_cx(Cx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::vector<Cx> finite_sorted(const std::vector<Cx>& vals, double cap) {
  std::vector<Cx> out;
  for (Cx z : vals)
    if (finite_cx(z) && std::abs(z) <= cap) out.push_back(z);
  std::sort(out.begin(), out.end(), [](Cx a, Cx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

// Clenshaw on [0,L] for a coefficient slice of the eigenvector.
Cx eval_coeff(const Mat& vec, int offset, int N, int col, double x, double L) {
  const double t = 2.0 * x / L - 1.0;
  Cx b1{0.0, 0.0}, b2{0.0, 0.0};
  for (int j = N - 1; j >= 1; --j) {
    const Cx b0 = vec(offset + j, col) + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return vec(offset, col) + t * b1 - b2;
}

constexpr double kTwoGridRel = 1e-6;
constexpr double kValueCap = 1e8;

}  // namespace

std::vector<Cx> collocation_eigenvalues_raw(const ValidatedParameters& p, int N) {
  if (N < 32) fail(Err::BadArgument, "collocation needs at least 32 nodes");
  return finite_sorted(solve_pencil(assemble_pencil(p, N), false).values, kValueCap);
}

std::vector<Cx> collocation_eigenvalues(const ValidatedParameters& p, int N) {
  const std::vector<Cx> coarse = collocation_eigenvalues_raw(p, N);
  const std::vector<Cx> fine = collocation_eigenvalues_raw(p, (5 * N) / 4);
  std::vector<Cx> stable;
  for (Cx z : coarse) {
    double gap = std::numeric_limits<double>::infinity();
    for (Cx w : fine) gap = std::min(gap, std::abs(z - w));
    if (gap <= kTwoGridRel * std::max(1.0, std::abs(z))) stable.push_back(z);
  }
  if (stable.empty())
    fail(Err::ResolutionInsufficient, "no eigenvalue stable between the two grids");
  return stable;
}

CollocationMode collocation_lowest_mode(const ValidatedParameters& p, int N) {
  if (N < 32) fail(Err::BadArgument, "collocation needs at least 32 nodes");
  GeneralizedEigen eig = solve_pencil(assemble_pencil(p, N), true);
  const std::vector<Cx> fine = collocation_eigenvalues_raw(p, (5 * N) / 4);

  int best = -1;
  double best_mod = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    const Cx z = eig.values[k];
    if (!finite_cx(z) || std::abs(z) > kValueCap || std::abs(z) < 1e-8) continue;
    double gap = std::numeric_limits<double>::infinity();
    for (Cx w : fine) gap = std::min(gap, std::abs(z - w));
    if (gap > kTwoGridRel * std::max(1.0, std::abs(z))) continue;
    if (std::abs(z) < best_mod) {
      best_mod = std::abs(z);
      best = static_cast<int>(k);
    }
  }
  if (best < 0)
    fail(Err::ResolutionInsufficient, "no stable eigenpair at this resolution");

  CollocationMode mode;
  mode.lambda = eig.values[static_cast<std::size_t>(best)];
  mode.state = zero_state(N, p.p.L);
  for (int i = 0; i < N; ++i) {
    const double x = mode.state.grid[static_cast<std::size_t>(i)];
    mode.state.f0[static_cast<std::size_t>(i)] = eval_coeff(eig.vectors, 0, N, best, x, p.p.L);
    mode.state.f1[static_cast<std::size_t>(i)] = eval_coeff(eig.vectors, N, N, best, x, p.p.L);
    mode.state.f2[static_cast<std::size_t>(i)] =
        eval_coeff(eig.vectors, 2 * N, N, best, x, p.p.L);
    mode.state.f3[static_cast<std::size_t>(i)] =
        eval_coeff(eig.vectors, 3 * N, N, best, x, p.p.L);
  }
  mode.state.f4 = eig.vectors(4 * N, best);

  double sup = std::abs(mode.state.f4);
  for (int i = 0; i < N; ++i)
    sup = std::max({sup, std::abs(mode.state.f0[static_cast<std::size_t>(i)]),
                    std::abs(mode.state.f1[static_cast<std::size_t>(i)]),
                    std::abs(mode.state.f2[static_cast<std::size_t>(i)]),
                    std::abs(mode.state.f3[static_cast<std::size_t>(i)])});
  if (sup > 0.0) mode.state = scaled(mode.state, Cx{1.0 / sup, 0.0});
  return mode;
}

}  // namespace harvester
