#include "harvester/asymptotics.hpp"

#include <algorithm>
#include <cmath>

namespace harvester {

namespace {

const Cx kI(0.0, 1.0);

double real_strict(Cx v) { return v.real(); }

}  // namespace

SpectralFunctions spectral_functions(Cx lambda, const BoundaryConstants& bc,
                                     const DerivedConstants& d) {
  if (lambda == Cx(0.0)) fail(Err::BadArgument, "spectral functions need lambda != 0");
  const Cx rt = std::sqrt(lambda);
  const Cx e1sq = std::exp(kI * 2.0 * d.c1 * lambda);
  const Cx e3sq = std::exp(kI * 2.0 * d.c3 * rt);
  SpectralFunctions f;
  f.g1 = -e1sq + bc.r11 - 1.0;
  f.g2 = -e3sq - kI;
  f.h1 = bc.r22 + 2.0 * d.c4 * e3sq;
  return f;
}

Cx unperturbed_branch(int branch, int n, const BoundaryConstants& bc,
                      const DerivedConstants& d) {
  if (n < 1) fail(Err::BadArgument, "branch index n must be >= 1");
  if (branch == 1) {
    const double r11m1 = real_strict(bc.r11) - 1.0;
    if (!(r11m1 > 0.0))
      fail(Err::Branch1ConditionViolated, "branch 1 needs r11 > 1 (k2 > sqrt(G*J))");
    return Cx(n * M_PI / d.c1, -std::log(r11m1) / (2.0 * d.c1));
  }
  if (branch == 2) {
    const double dn = n - 0.25;
    return Cx(dn * dn * M_PI * M_PI / (d.c3 * d.c3), 0.0);
  }
  fail(Err::BadArgument, "branch must be 1 or 2");
}

Admissibility branch1_admissible(int n, double delta, const BoundaryConstants& bc,
                                 const DerivedConstants& d, double kappa) {
  if (!(delta >= 0.0 && delta < 2.0)) fail(Err::BadArgument, "delta must lie in [0, 2)");
  const Cx center = unperturbed_branch(1, n, bc, d);
  const double eps = kappa / std::sqrt(double(n));
  const double g2c = std::abs(spectral_functions(center, bc, d).g2);

  // |g2'(lambda)| <= c3 |lambda|^{-1/2} |e^{i 2 c3 sqrt(lambda)}| and the
  // exponential is largest at the lowest Im sqrt(lambda) in the disk.
  double sup_exp = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double th = 2.0 * M_PI * k / 8.0;
    const Cx lam = center + eps * Cx(std::cos(th), std::sin(th));
    sup_exp = std::max(sup_exp, std::abs(std::exp(kI * 2.0 * d.c3 * std::sqrt(lam))));
  }
  const double lam_min = std::max(std::abs(center) - eps, 0.25 * std::abs(center));
  const double lip = d.c3 / std::sqrt(lam_min) * sup_exp;

  Admissibility a;
  a.g2_center = g2c;
  a.g2_min_estimate = g2c - eps * lip;
  a.admissible = a.g2_min_estimate > delta;
  return a;
}

BranchEigenvalue perturbed_branch1(int n, const BoundaryConstants& bc,
                                   const DerivedConstants& d, AdmissibilityOptions opt) {
  BranchEigenvalue r;
  r.branch = 1;
  r.n = n;
  r.lambda_unperturbed = unperturbed_branch(1, n, bc, d);
  const auto adm = branch1_admissible(n, opt.delta, bc, d, opt.kappa);
  r.admissible = adm.admissible;

  const Cx lt = r.lambda_unperturbed;
  const Cx rt = std::sqrt(lt);
  const auto sf = spectral_functions(lt, bc, d);
  if (std::abs(sf.g2) < 1e-8)
    fail(Err::G2TooSmall, "g2 vanishes at the branch-1 point; correction formula unsafe");

  const Cx r11m1 = bc.r11 - 1.0;
  const Cx num =
      1.0 + (kI * sf.h1 / sf.g2 + bc.r11 * bc.rhat11 / r11m1 -
             kI * bc.r12 * bc.r21 / (r11m1 * sf.g2)) / rt;
  const Cx den = 1.0 + kI * sf.h1 / sf.g2 / rt;
  r.K1 = num / den;
  const Cx logK = std::log(r.K1);
  if (std::abs(logK.imag()) > M_PI / 2.0) {
    r.flagged = true;
    r.flag_note = "log-branch wraparound in K1";
  }
  r.correction_w = -kI * logK / (2.0 * d.c1 * lt);
  r.lambda_perturbed = lt * (1.0 + r.correction_w);
  return r;
}

BranchEigenvalue perturbed_branch2(int n, double tol, const BoundaryConstants& bc,
                                   const DerivedConstants& d) {
  if (!(tol > 0.0)) fail(Err::BadArgument, "newton tolerance must be positive");
  BranchEigenvalue r;
  r.branch = 2;
  r.n = n;
  const Cx lt = unperturbed_branch(2, n, bc, d);
  r.lambda_unperturbed = lt;
  const Cx rt = std::sqrt(lt);

  const Cx r11m1 = bc.r11 - 1.0;
  const Cx T = (kI * bc.r22 + 2.0 * d.c4) / rt;
  const Cx e1sq = std::exp(kI * 2.0 * d.c1 * lt);
  const Cx rhs = kI * bc.r12 * bc.r21 / rt;

  auto F = [&](Cx w) {
    return (T - d.c3 * rt * w) * (-e1sq * std::exp(kI * 2.0 * d.c1 * lt * w) + r11m1) - rhs;
  };
  auto Fp = [&](Cx w) {
    const Cx ew = e1sq * std::exp(kI * 2.0 * d.c1 * lt * w);
    return -d.c3 * rt * (-ew + r11m1) + (T - d.c3 * rt * w) * (-kI * 2.0 * d.c1 * lt * ew);
  };

  const double scale =
      std::abs(T) * (std::abs(r11m1) + 1.0) + std::abs(rhs) + 1e-300;

  Cx w0;
  const Cx g1 = -e1sq + bc.r11 - 1.0;
  if (std::abs(g1) < 1e-8) {
    w0 = 0.0;  // explicit guess divides by g1; start from zero instead
    r.flagged = true;
    r.flag_note = "g1 too small for the explicit initial guess";
  } else {
    w0 = ((kI * bc.r22 + 2.0 * d.c4) - kI * bc.r12 * bc.r21 / g1) / (d.c3 * lt);
  }

  Cx w = w0;
  Cx fw = F(w);
  int it = 0;
  bool converged = std::abs(fw) <= tol * scale;
  while (!converged && it < 50) {
    ++it;
    const Cx deriv = Fp(w);
    if (deriv == Cx(0.0)) break;
    Cx step = -fw / deriv;
    Cx wn = w + step;
    Cx fn = F(wn);
    int halvings = 0;
    while (std::abs(fn) >= std::abs(fw) && halvings < 25) {
      step *= 0.5;
      wn = w + step;
      fn = F(wn);
      ++halvings;
    }
    if (std::abs(fn) >= std::abs(fw)) break;  // stuck
    w = wn;
    fw = fn;
    converged = std::abs(fw) <= tol * scale;
  }
  if (!converged)
    fail(Err::NewtonDivergence, "branch-2 correction Newton did not reach tolerance at n=" +
                                    std::to_string(n));
  r.newton_iterations = it;
  r.correction_w = w;
  r.lambda_perturbed = lt * (1.0 + w);
  return r;
}

BranchEigenvalue mirror_record(const BranchEigenvalue& r) {
  BranchEigenvalue m = r;
  m.mirrored = true;
  m.lambda_unperturbed = -std::conj(r.lambda_unperturbed);
  m.correction_w = std::conj(r.correction_w);
  m.lambda_perturbed = -std::conj(r.lambda_perturbed);
  m.K1 = std::conj(r.K1);
  return m;
}

ReducedTerms reduced_equation_terms(Cx lambda, const BoundaryConstants& bc,
                                    const DerivedConstants& d) {
  if (lambda == Cx(0.0)) fail(Err::BadArgument, "reduced terms need lambda != 0");
  const Cx rt = std::sqrt(lambda);
  const Cx e1sq = std::exp(kI * 2.0 * d.c1 * lambda);
  const Cx e3sq = std::exp(kI * 2.0 * d.c3 * rt);
  const Cx H1 = -e1sq + bc.r11 - 1.0;
  const Cx H2 = -e3sq - kI;
  const double a3 = d.a3, a4 = d.a4;

  ReducedTerms t;
  t.D1_tilde = kI * bc.r22 * (bc.rhat22 - bc.d1) + kI * 4.0 * a4 * e3sq -
               (2.0 * a4 / (1.0 - kI)) * ((1.0 - kI * a3) / a3) * (kI * e3sq + 1.0) -
               kI * (2.0 * a4 / (1.0 + kI)) * ((1.0 + kI * a3) / a3) * e3sq;
  t.D1 = H1 * H2 + (kI * bc.r22 * H1 + bc.r11 * bc.rhat11 * H2) / rt +
         (t.D1_tilde * H1 + kI * bc.r11 * bc.rhat11 * bc.r22 + bc.r11 * bc.rtilde11 * H2) /
             lambda;
  t.D2 = kI * bc.r12 * bc.r21 / rt * (1.0 - 2.0 * bc.rhat12 / rt);
  return t;
}

std::vector<BranchEigenvalue> branch_sweep(int branch, int n_max, const BoundaryConstants& bc,
                                           const DerivedConstants& d, AdmissibilityOptions opt,
                                           double newton_tol, bool with_mirrors) {
  if (n_max < 1) fail(Err::BadArgument, "n_max must be >= 1");
  std::vector<BranchEigenvalue> out;
  auto push = [&](BranchEigenvalue r) {
    if (with_mirrors) {
      auto m = mirror_record(r);
      out.push_back(std::move(r));
      out.push_back(std::move(m));
    } else {
      out.push_back(std::move(r));
    }
  };
  for (int b : {1, 2}) {
    if (branch != 0 && branch != b) continue;
    for (int n = 1; n <= n_max; ++n) {
      try {
        push(b == 1 ? perturbed_branch1(n, bc, d, opt)
                    : perturbed_branch2(n, newton_tol, bc, d));
      } catch (const Error& e) {
        BranchEigenvalue r;
        r.branch = b;
        r.n = n;
        try {
          r.lambda_unperturbed = unperturbed_branch(b, n, bc, d);
        } catch (const Error&) {
          r.lambda_unperturbed = Cx(0.0);
        }
        r.lambda_perturbed = r.lambda_unperturbed;
        r.flagged = true;
        r.flag_note = e.what();
        push(std::move(r));
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.branch != y.branch) return x.branch < y.branch;
    if (x.n != y.n) return x.n < y.n;
    return int(x.mirrored) < int(y.mirrored);
  });
  return out;
}

}  // namespace harvester
