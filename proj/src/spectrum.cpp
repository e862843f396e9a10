#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "harvester/eigensolver.hpp"

namespace harvester {

namespace {

// Bisection fractions tried in order when a split line lands on a root (the
// children then fail zero-count conservation or trip boundary-zero retries).
constexpr double kSplitFractions[] = {0.5, 0.47, 0.53, 0.41, 0.59};

// Boxes smaller than this relative diameter holding >= 2 zeros are treated as
// a genuine multiple root rather than split further.
constexpr double kClusterDiameter = 1e-7;

int resolve_threads(int requested) {
  int base = requested > 0 ? requested
                           : static_cast<int>(std::thread::hardware_concurrency());
  if (base <= 0) base = 1;
  if (const char* env = std::getenv("HARVESTER_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0 && cap < base) base = static_cast<int>(cap);
  }
  return base;
}

SearchRegion child_box(const SearchRegion& parent, bool high, bool split_re,
                       double frac) {
  SearchRegion c = parent;
  if (split_re) {
    const double cut = parent.re_min + frac * parent.width();
    (high ? c.re_min : c.re_max) = cut;
  } else {
    const double cut = parent.im_min + frac * parent.height();
    (high ? c.im_min : c.im_max) = cut;
  }
  return c;
}

// A split line must not slice through an exclusion disk; count_zeros treats
// straddling disks as caller error.
bool split_avoids_disks(const SearchRegion& parent, bool split_re, double frac) {
  const double cut = split_re ? parent.re_min + frac * parent.width()
                              : parent.im_min + frac * parent.height();
  for (const Disk& d : parent.exclusions) {
    const double c = split_re ? d.center.real() : d.center.imag();
    const double o = split_re ? d.center.imag() : d.center.real();
    const double olo = split_re ? parent.im_min : parent.re_min;
    const double ohi = split_re ? parent.im_max : parent.re_max;
    if (o + d.radius < olo || o - d.radius > ohi) continue;
    if (std::abs(cut - c) <= 1.5 * d.radius) return false;
  }
  return true;
}

struct Task {
  SearchRegion box;
  int count = 0;
  int depth = 0;
};

class SubdivisionSolver {
 public:
  SubdivisionSolver(const ContourFn& f, const SolveOptions& opt)
      : f_(f), opt_(opt) {}

  void run(const SearchRegion& root, int root_count, int threads);

  std::vector<EigenvalueRecord> records;
  int unresolved_boxes = 0;

 private:
  void process(Task t);
  void refine_box(const SearchRegion& box, int count);
  bool refine_inside(const SearchRegion& box);
  void finish_unresolved(const SearchRegion& box, int count);
  void emit(EigenvalueRecord rec, bool unresolved);
  Cx best_seed(const SearchRegion& box) const;

  const ContourFn& f_;
  const SolveOptions& opt_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Task> queue_;
  int busy_ = 0;
};

void SubdivisionSolver::emit(EigenvalueRecord rec, bool unresolved) {
  std::lock_guard<std::mutex> lk(mu_);
  records.push_back(std::move(rec));
  if (unresolved) ++unresolved_boxes;
}

void SubdivisionSolver::finish_unresolved(const SearchRegion& box, int count) {
  EigenvalueRecord rec;
  rec.value = Cx{0.5 * (box.re_min + box.re_max), 0.5 * (box.im_min + box.im_max)};
  rec.method = Method::Determinant;
  rec.multiplicity = std::max(1, count);
  rec.status = RecordStatus::Unresolved;
  rec.residual = std::numeric_limits<double>::infinity();
  emit(rec, true);
}

Cx SubdivisionSolver::best_seed(const SearchRegion& box) const {
  // seed at the smallest relative value over a coarse interior grid; the box
  // center alone can sit on a ridge between the root and the boundary
  Cx seed{0.5 * (box.re_min + box.re_max), 0.5 * (box.im_min + box.im_max)};
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      const Cx z{box.re_min + box.width() * i / 4.0,
                 box.im_min + box.height() * j / 4.0};
      try {
        auto [v, sc] = f_.eval(z);
        const double rel = std::abs(v) / std::max(sc, 1e-300);
        if (rel < best) {
          best = rel;
          seed = z;
        }
      } catch (const Error&) {
        // pole-adjacent sample: skip as a seed candidate
      }
    }
  }
  return seed;
}

void SubdivisionSolver::refine_box(const SearchRegion& box, int count) {
  EigenvalueRecord rec;
  rec.method = Method::Determinant;
  rec.multiplicity = count;
  try {
    const RefineResult r = refine_root(best_seed(box), f_, opt_.refine_tol, box.diameter());
    rec.value = r.lambda;
    rec.residual = r.residual;
    rec.status = r.converged ? RecordStatus::Ok : RecordStatus::NotConverged;
    // an iterate that left its box duplicates a neighbour's root and breaks
    // count conservation; keep it but mark it suspect
    const double mre = 0.3 * box.width(), mim = 0.3 * box.height();
    if (r.lambda.real() < box.re_min - mre || r.lambda.real() > box.re_max + mre ||
        r.lambda.imag() < box.im_min - mim || r.lambda.imag() > box.im_max + mim)
      rec.status = RecordStatus::NotConverged;
    emit(rec, false);
  } catch (const Error&) {
    finish_unresolved(box, count);
  }
}

// Refine a single-root box and accept only an iterate that stayed strictly
// inside it; an escape means the seed was poor (long thin box, root near a
// corner) and the caller should subdivide instead of trusting the result.
bool SubdivisionSolver::refine_inside(const SearchRegion& box) {
  RefineResult r;
  try {
    r = refine_root(best_seed(box), f_, opt_.refine_tol, box.diameter());
  } catch (const Error&) {
    return false;
  }
  if (!r.converged || !box.contains(r.lambda)) return false;
  EigenvalueRecord rec;
  rec.method = Method::Determinant;
  rec.multiplicity = 1;
  rec.value = r.lambda;
  rec.residual = r.residual;
  rec.status = RecordStatus::Ok;
  emit(rec, false);
  return true;
}

void SubdivisionSolver::process(Task t) {
  if (t.count <= 0) return;
  if (t.box.diameter() <
      kClusterDiameter * (1.0 + std::abs(Cx{t.box.re_min, t.box.im_min}))) {
    refine_box(t.box, t.count);
    return;
  }
  if (t.count == 1 && refine_inside(t.box)) return;
  if (t.depth >= t.box.max_depth) {
    // out of depth: for one root take the best local estimate, flagged by
    // refine_box when it is suspect; clusters stay unresolved
    if (t.count == 1) refine_box(t.box, t.count);
    else finish_unresolved(t.box, t.count);
    return;
  }

  const bool split_re = t.box.width() >= t.box.height();
  for (double frac : kSplitFractions) {
    if (!split_avoids_disks(t.box, split_re, frac)) continue;
    SearchRegion lo = child_box(t.box, false, split_re, frac);
    SearchRegion hi = child_box(t.box, true, split_re, frac);
    int c_lo = 0, c_hi = 0;
    try {
      c_lo = count_zeros(lo, f_);
      c_hi = count_zeros(hi, f_);
    } catch (const Error&) {
      continue;  // root pinned to this split line; try the next fraction
    }
    if (c_lo + c_hi != t.count) continue;  // dilation leaked a root across
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (c_lo > 0) queue_.push_back(Task{lo, c_lo, t.depth + 1});
      if (c_hi > 0) queue_.push_back(Task{hi, c_hi, t.depth + 1});
    }
    cv_.notify_all();
    return;
  }
  finish_unresolved(t.box, t.count);
}

void SubdivisionSolver::run(const SearchRegion& root, int root_count, int threads) {
  if (root_count <= 0) return;
  queue_.push_back(Task{root, root_count, 0});

  auto worker = [this]() {
    std::unique_lock<std::mutex> lk(mu_);
    for (;;) {
      cv_.wait(lk, [this] { return !queue_.empty() || busy_ == 0; });
      if (queue_.empty()) {
        if (busy_ == 0) return;
        continue;
      }
      Task t = queue_.front();
      queue_.pop_front();
      ++busy_;
      lk.unlock();
      try {
        process(std::move(t));
      } catch (...) {
        // defensive: a box must never take down the pool
      }
      lk.lock();
      --busy_;
      if (busy_ == 0 && queue_.empty()) cv_.notify_all();
    }
  };

  const int n = std::max(1, std::min(threads, root_count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n) - 1);
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

bool record_order(const EigenvalueRecord& a, const EigenvalueRecord& b) {
  if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
  if (a.value.imag() != b.value.imag()) return a.value.imag() < b.value.imag();
  return a.mirrored < b.mirrored;
}

int status_rank(RecordStatus s) {
  switch (s) {
    case RecordStatus::Ok: return 0;
    case RecordStatus::NotConverged: return 1;
    case RecordStatus::Unresolved: return 2;
  }
  return 3;
}

std::vector<EigenvalueRecord> deduplicate(std::vector<EigenvalueRecord> recs,
                                          double rel) {
  std::sort(recs.begin(), recs.end(), record_order);
  std::vector<EigenvalueRecord> out;
  for (auto& r : recs) {
    if (!out.empty()) {
      EigenvalueRecord& last = out.back();
      const double tol = rel * std::max(1.0, std::abs(r.value));
      if (last.status != RecordStatus::Unresolved && r.status != RecordStatus::Unresolved &&
          std::abs(last.value - r.value) <= tol) {
        // same root found from two boxes: keep the better-converged copy
        if (std::make_pair(status_rank(r.status), r.residual) <
            std::make_pair(status_rank(last.status), last.residual))
          last = r;
        continue;
      }
    }
    out.push_back(r);
  }
  return out;
}

struct Prediction {
  int branch;
  int n;
  Cx lambda;
  double spacing;
  std::optional<bool> admissible;
};

std::vector<Prediction> branch_predictions(const SearchRegion& region,
                                           const ValidatedParameters& p,
                                           const SolveOptions& opt) {
  const DerivedConstants d = derive_constants(p);
  const BoundaryConstants bc = boundary_constants(p, d);
  std::vector<Prediction> preds;

  const double re_hi = region.re_max * 1.05 + 1.0;
  // branch 1: Re spacing pi/c1
  const double spacing1 = std::numbers::pi / d.c1;
  const int n1_max = static_cast<int>(std::ceil(re_hi / spacing1)) + 2;
  try {
    auto sweep = branch_sweep(1, n1_max, bc, d, opt.admissibility, opt.newton_tol,
                              /*with_mirrors=*/false);
    for (const auto& r : sweep) {
      const Cx lam = r.flagged ? r.lambda_unperturbed : r.lambda_perturbed;
      preds.push_back(Prediction{1, r.n, lam, spacing1, r.admissible});
    }
  } catch (const Error&) {
    // branch-1 closed form unavailable (r11 <= 1): classification proceeds
    // with branch 2 only
  }

  const int n2_max =
      static_cast<int>(std::ceil(d.c3 * std::sqrt(re_hi) / std::numbers::pi + 0.25)) + 2;
  try {
    auto sweep = branch_sweep(2, n2_max, bc, d, opt.admissibility, opt.newton_tol,
                              /*with_mirrors=*/false);
    for (const auto& r : sweep) {
      const Cx lam = r.flagged ? r.lambda_unperturbed : r.lambda_perturbed;
      const double here = unperturbed_branch(2, r.n, bc, d).real();
      const double next = unperturbed_branch(2, r.n + 1, bc, d).real();
      preds.push_back(Prediction{2, r.n, lam, next - here, std::nullopt});
    }
  } catch (const Error&) {
  }
  return preds;
}

void classify_records(std::vector<EigenvalueRecord>& recs,
                      const std::vector<Prediction>& preds, double match_fraction) {
  for (auto& r : recs) {
    if (r.status == RecordStatus::Unresolved) continue;
    // nearest prediction in absolute distance; the branch-2 spacing grows
    // like n^2, so normalizing first would let branch 2 poach branch-1 roots
    double best_dist = std::numeric_limits<double>::infinity();
    const Prediction* best = nullptr;
    for (const auto& pr : preds) {
      const double dist = std::abs(r.value - pr.lambda);
      if (dist > match_fraction * pr.spacing) continue;
      if (dist < best_dist) {
        best_dist = dist;
        best = &pr;
      }
    }
    if (best) {
      r.branch = best->branch;
      r.n = best->n;
      r.admissible = best->admissible;
    }
  }
}

}  // namespace

SpectrumResult find_spectrum(const SearchRegion& region, const ValidatedParameters& p,
                             const SolveOptions& opt) {
  const DispersionEvaluator ev(p);
  const ContourFn fn = dispersion_contour(ev);

  SpectrumResult result;
  result.total_count = count_zeros(region, fn);
  if (result.total_count == 0) return result;

  SubdivisionSolver solver(fn, opt);
  solver.run(region, result.total_count, resolve_threads(opt.threads));
  result.unresolved_boxes = solver.unresolved_boxes;
  result.records = deduplicate(std::move(solver.records), opt.dedup_rel);

  if (opt.classify)
    classify_records(result.records, branch_predictions(region, p, opt),
                     opt.match_fraction);

  if (opt.append_mirrors && region.re_min >= 0.0) {
    std::vector<EigenvalueRecord> mirrors;
    for (const auto& r : result.records) {
      if (r.status == RecordStatus::Unresolved) continue;
      if (r.value.real() <= 1e-12) continue;
      EigenvalueRecord m = r;
      m.value = Cx{-r.value.real(), r.value.imag()};
      m.mirrored = true;
      try {
        auto [v, sc] = fn.eval(m.value);
        m.residual = std::abs(v) / std::max(sc, 1e-300);
        m.status = RecordStatus::Ok;
      } catch (const Error&) {
        m.residual = std::numeric_limits<double>::infinity();
        m.status = RecordStatus::NotConverged;
      }
      mirrors.push_back(std::move(m));
    }
    result.records.insert(result.records.end(), mirrors.begin(), mirrors.end());
  }

  std::sort(result.records.begin(), result.records.end(), record_order);
  return result;
}

std::optional<EigenvalueRecord> find_branch_root(const ValidatedParameters& p,
                                                 int branch, int n,
                                                 const SolveOptions& opt) {
  if (branch != 1 && branch != 2) fail(Err::BadArgument, "branch must be 1 or 2");
  if (n < 1) fail(Err::BadArgument, "branch index must be positive");
  const DerivedConstants d = derive_constants(p);
  const BoundaryConstants bc = boundary_constants(p, d);

  Cx guess;
  double spacing;
  if (branch == 1) {
    try {
      guess = perturbed_branch1(n, bc, d).lambda_perturbed;
    } catch (const Error&) {
      guess = unperturbed_branch(1, n, bc, d);
    }
    spacing = std::numbers::pi / d.c1;
  } else {
    try {
      guess = perturbed_branch2(n, opt.newton_tol, bc, d).lambda_perturbed;
    } catch (const Error&) {
      guess = unperturbed_branch(2, n, bc, d);
    }
    spacing = unperturbed_branch(2, n + 1, bc, d).real() -
              unperturbed_branch(2, n, bc, d).real();
  }

  SolveOptions local = opt;
  local.append_mirrors = false;
  local.classify = false;
  local.threads = 1;

  double half = branch == 1 ? 0.35 * spacing : std::min(0.35 * spacing, 4.0);
  for (int attempt = 0; attempt < 2; ++attempt) {
    const double re_lo = std::max(0.05, guess.real() - half);
    SearchRegion box = make_region(p, re_lo, guess.real() + half,
                                   guess.imag() - half, guess.imag() + half);
    SpectrumResult res;
    try {
      res = find_spectrum(box, p, local);
    } catch (const Error&) {
      half *= 1.37;  // boundary pinched a root: nudge the window and retry
      continue;
    }

    const EigenvalueRecord* best = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& r : res.records) {
      if (r.status == RecordStatus::Unresolved) continue;
      const double dist = std::abs(r.value - guess);
      if (dist < best_dist) {
        best_dist = dist;
        best = &r;
      }
    }
    if (best) {
      EigenvalueRecord rec = *best;
      rec.branch = branch;
      rec.n = n;
      if (branch == 1) {
        try {
          rec.admissible = branch1_admissible(n, opt.admissibility.delta, bc, d,
                                              opt.admissibility.kappa)
                               .admissible;
        } catch (const Error&) {
          rec.admissible = std::nullopt;
        }
      }
      return rec;
    }
    half *= 2.0;
  }
  return std::nullopt;
}

}  // namespace harvester
