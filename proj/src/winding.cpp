#include <algorithm>
#include <cmath>
#include <numbers>

#include "harvester/eigensolver.hpp"

namespace harvester {

namespace {

constexpr double kBoundaryZeroRel = 1e-11;      // |f|/scale treated as on-path zero
constexpr double kDilationFraction = 1e-6;      // growth per boundary-zero retry
constexpr int kDilationRetries = 3;
constexpr int kSegmentDepthLimit = 52;
constexpr double kPhaseStepLimit = std::numbers::pi / 2.0;
constexpr double kModulusRatioLimit = 6.0;      // adjacent samples within this factor

struct WalkState {
  const ContourFn* f = nullptr;
  long evals = 0;
  long budget = 0;
  double min_rel = std::numeric_limits<double>::infinity();
  bool boundary_zero = false;
};

struct Probe {
  Cx value;
  double rel;  // |value| / scale
};

Probe probe(WalkState& st, Cx z) {
  if (st.evals >= st.budget)
    fail(Err::PhaseUndersampled, "contour sample budget exhausted");
  ++st.evals;
  auto [v, sc] = st.f->eval(z);
  const double rel = std::abs(v) / std::max(sc, 1e-300);
  st.min_rel = std::min(st.min_rel, rel);
  if (rel < kBoundaryZeroRel) st.boundary_zero = true;
  return Probe{v, rel};
}

bool step_ok(const Probe& a, const Probe& b, double* dphi) {
  const double ma = std::abs(a.value), mb = std::abs(b.value);
  if (ma <= 0.0 || mb <= 0.0) return false;
  *dphi = std::arg(b.value / a.value);
  const double ratio = mb > ma ? mb / ma : ma / mb;
  return std::abs(*dphi) < kPhaseStepLimit && ratio < kModulusRatioLimit;
}

// Accumulated phase of f along the straight segment z0 -> z1, subdividing
// until adjacent samples differ by < pi/2 in phase and by a bounded modulus
// ratio.  A principal-value step of, say, 2pi - 0.1 looks like -0.1, so no
// step is trusted on its own: acceptance requires the two midpoint halves to
// reproduce the whole (an aliased step differs from its halves by ~2pi).
double segment_phase(WalkState& st, Cx z0, const Probe& p0, Cx z1, const Probe& p1,
                     int depth) {
  if (st.boundary_zero) return 0.0;
  if (depth >= kSegmentDepthLimit)
    fail(Err::PhaseUndersampled, "contour segment refinement too deep");
  const Cx zm = 0.5 * (z0 + z1);
  double dphi = 0.0;
  const bool whole_ok = step_ok(p0, p1, &dphi);
  const Probe pm = probe(st, zm);
  if (st.boundary_zero) return 0.0;
  if (whole_ok) {
    double dl = 0.0, dr = 0.0;
    if (step_ok(p0, pm, &dl) && step_ok(pm, p1, &dr) &&
        std::abs(dl + dr - dphi) < 1e-6)
      return dl + dr;
  }
  return segment_phase(st, z0, p0, zm, pm, depth + 1) +
         segment_phase(st, zm, pm, z1, p1, depth + 1);
}

// Closed-path winding over the polyline (points.back() joins points.front()).
double closed_path_phase(WalkState& st, const std::vector<Cx>& points) {
  std::vector<Probe> probes;
  probes.reserve(points.size());
  for (Cx z : points) {
    probes.push_back(probe(st, z));
    if (st.boundary_zero) return 0.0;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t j = (i + 1) % points.size();
    total += segment_phase(st, points[i], probes[i], points[j], probes[j], 0);
    if (st.boundary_zero) return 0.0;
  }
  return total;
}

std::vector<Cx> rectangle_path(const SearchRegion& r, int samples_min) {
  const int floor_per_edge = std::max(4, samples_min / 4);
  // initial samples dense enough that the expected phase step stays near
  // pi/4; adaptive bisection handles the rest but must not start aliased
  auto edge_samples = [&](double len) {
    int n = floor_per_edge;
    if (r.phase_rate > 0.0) {
      const double want = len * r.phase_rate / (std::numbers::pi / 4.0);
      n = std::max(n, static_cast<int>(std::ceil(want)));
    }
    return n;
  };
  std::vector<Cx> pts;
  const Cx c00{r.re_min, r.im_min}, c10{r.re_max, r.im_min};
  const Cx c11{r.re_max, r.im_max}, c01{r.re_min, r.im_max};
  auto edge = [&](Cx a, Cx b) {
    const int n = edge_samples(std::abs(b - a));
    for (int k = 0; k < n; ++k)
      pts.push_back(a + (b - a) * (static_cast<double>(k) / n));
  };
  edge(c00, c10);
  edge(c10, c11);
  edge(c11, c01);
  edge(c01, c00);
  return pts;
}

std::vector<Cx> circle_path(const Disk& d, int samples_min) {
  const int n = std::max(16, samples_min);
  std::vector<Cx> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    pts.push_back(d.center + d.radius * Cx{std::cos(t), std::sin(t)});
  }
  return pts;
}

enum class DiskPosition { Outside, Inside, Straddling };

DiskPosition disk_position(const SearchRegion& r, const Disk& d) {
  const double x = d.center.real(), y = d.center.imag();
  const bool center_in = x > r.re_min && x < r.re_max && y > r.im_min && y < r.im_max;
  // distance from center to the rectangle boundary
  const double dx = std::min(x - r.re_min, r.re_max - x);
  const double dy = std::min(y - r.im_min, r.im_max - y);
  if (center_in) {
    return std::min(dx, dy) > d.radius ? DiskPosition::Inside : DiskPosition::Straddling;
  }
  // center outside: nearest boundary distance
  const double ox = std::max({r.re_min - x, 0.0, x - r.re_max});
  const double oy = std::max({r.im_min - y, 0.0, y - r.im_max});
  const double dist = std::hypot(ox, oy);
  return dist > d.radius ? DiskPosition::Outside : DiskPosition::Straddling;
}

int round_winding(double total_phase) {
  const double w = total_phase / (2.0 * std::numbers::pi);
  const long n = std::lround(w);
  if (std::abs(w - static_cast<double>(n)) > 0.25)
    fail(Err::PhaseUndersampled, "winding sum is not close to an integer");
  return static_cast<int>(n);
}

}  // namespace

double SearchRegion::diameter() const { return std::hypot(width(), height()); }

bool SearchRegion::contains(Cx z) const {
  return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min &&
         z.imag() <= im_max;
}

SearchRegion make_region(const ValidatedParameters& p, double re_min, double re_max,
                         double im_min, double im_max) {
  if (!(re_min < re_max) || !(im_min < im_max))
    fail(Err::BadArgument, "search region is not well ordered");
  SearchRegion r;
  r.re_min = re_min;
  r.re_max = re_max;
  r.im_min = im_min;
  r.im_max = im_max;
  const Cx pole{0.0, 1.0 / (p.p.Cp * p.p.R)};
  r.exclusions.push_back(Disk{pole, 5.0 * kPoleRadius});
  // the fastest oscillation of the dispersion determinant comes from the
  // e^{+-i 2 c1 lambda} pair, with a c3 sqrt(lambda) rate on top near the
  // origin; this sets the initial boundary sampling density
  const DerivedConstants d = derive_constants(p);
  r.phase_rate = 2.0 * (d.c1 + d.c3);
  return r;
}

SearchRegion default_region(const ValidatedParameters& p) {
  return make_region(p, 0.3, 120.0, -0.5, 8.0);
}

ContourFn dispersion_contour(const DispersionEvaluator& ev) {
  ContourFn f;
  f.eval = [ev](Cx z) {
    const DispersionValue v = ev(z);
    return std::pair<Cx, double>{v.value, v.condition};
  };
  return f;
}

int count_zeros(const SearchRegion& region, const ContourFn& f) {
  SearchRegion r = region;
  const double grow = kDilationFraction * std::max(region.width(), region.height());
  for (int attempt = 0;; ++attempt) {
    WalkState st;
    st.f = &f;
    st.budget = std::max<long>(500000, 256L * std::max(1, r.boundary_samples_min));

    // exclusion disks: subtract the winding of fully interior disks so their
    // holes do not contribute; disks that cross the boundary are a caller bug
    double total = 0.0;
    bool retry = false;
    std::vector<const Disk*> interior;
    for (const Disk& d : r.exclusions) {
      switch (disk_position(r, d)) {
        case DiskPosition::Outside: break;
        case DiskPosition::Inside: interior.push_back(&d); break;
        case DiskPosition::Straddling:
          fail(Err::BadArgument, "exclusion disk crosses the region boundary");
      }
    }

    total = closed_path_phase(st, rectangle_path(r, r.boundary_samples_min));
    if (st.boundary_zero) retry = true;
    if (!retry) {
      for (const Disk* d : interior) {
        total -= closed_path_phase(st, circle_path(*d, std::max(32, r.boundary_samples_min / 2)));
        if (st.boundary_zero) {
          retry = true;
          break;
        }
      }
    }
    if (!retry) return round_winding(total);
    if (attempt >= kDilationRetries)
      fail(Err::BoundaryZero, "root pinned to the contour after dilation retries");
    r.re_min -= grow;
    r.re_max += grow;
    r.im_min -= grow;
    r.im_max += grow;
  }
}

RefineResult refine_root(Cx lambda0, const ContourFn& f, double tol, double max_step) {
  auto eval = [&f](Cx z) { return f.eval(z); };
  const double h = std::max(1e-6, 1e-4 * std::abs(lambda0));

  Cx x0 = lambda0 + Cx{h, 0.0}, x1 = lambda0 + Cx{0.0, h}, x2 = lambda0;
  auto [f0, s0] = eval(x0);
  auto [f1, s1] = eval(x1);
  auto [f2, s2] = eval(x2);

  RefineResult best{x2, std::abs(f2) / std::max(s2, 1e-300), 0, false};
  const int max_iter = 100;
  for (int it = 1; it <= max_iter; ++it) {
    const Cx q = (x2 - x1) / (x1 - x0);
    const Cx A = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
    const Cx B = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 + q * q * f0;
    const Cx C = (1.0 + q) * f2;
    const Cx disc = std::sqrt(B * B - 4.0 * A * C);
    const Cx denom = std::abs(B + disc) >= std::abs(B - disc) ? B + disc : B - disc;
    Cx step;
    if (std::abs(denom) == 0.0) {
      step = -(x2 - x1);  // degenerate quadratic: fall back to a bisection-ish move
    } else {
      step = -(x2 - x1) * 2.0 * C / denom;
    }
    if (std::abs(step) > max_step) step *= max_step / std::abs(step);

    const Cx x3 = x2 + step;
    auto [f3, s3] = eval(x3);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
    x2 = x3;
    f2 = f3;
    s2 = s3;

    const double rel = std::abs(f2) / std::max(s2, 1e-300);
    if (rel < best.residual) best = RefineResult{x2, rel, it, false};
    if (rel <= tol) return RefineResult{x2, rel, it, true};
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x2))) {
      // stagnated: accept if within an order of magnitude of the target
      best.converged = best.residual <= 10.0 * tol;
      best.iterations = it;
      return best;
    }
  }
  best.iterations = max_iter;
  return best;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Determinant: return "determinant";
    case Method::Collocation: return "collocation";
    case Method::Asymptotic1: return "asymptotic1";
    case Method::Asymptotic2: return "asymptotic2";
  }
  return "unknown";
}

std::string to_string(RecordStatus s) {
  switch (s) {
    case RecordStatus::Ok: return "ok";
    case RecordStatus::Unresolved: return "unresolved";
    case RecordStatus::NotConverged: return "not_converged";
  }
  return "unknown";
}

}  // namespace harvester
