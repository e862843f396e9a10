#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "harvester/asymptotics.hpp"
#include "harvester/charroots.hpp"
#include "harvester/cli.hpp"
#include "harvester/csvio.hpp"
#include "harvester/dispersion.hpp"
#include "harvester/eigensolver.hpp"
#include "harvester/model.hpp"
#include "harvester/state.hpp"
#include "harvester/types.hpp"
#include "harvester/verification.hpp"

namespace harvester {
namespace {

using json = nlohmann::ordered_json;

// Codes caused by what the user handed us (files, flags, parameter regimes);
// everything else means a computation came back partial.
bool is_input_error(Err code) {
  switch (code) {
    case Err::NonPositiveParameter:
    case Err::CouplingTooStrong:
    case Err::BalancedPiezoViolated:
    case Err::Branch1ConditionViolated:
    case Err::MissingKey:
    case Err::UnknownKey:
    case Err::BadValue:
    case Err::BadArgument:
    case Err::GridTooCoarse:
    case Err::GridMismatch:
      return true;
    default:
      return false;
  }
}

std::string fmt_cx(Cx z) {
  std::string s = format_double(z.real());
  s += (z.imag() < 0 ? "-" : "+");
  s += format_double(std::abs(z.imag()));
  s += "i";
  return s;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

ValidatedParameters load_params(const std::string& config, const Strictness& strict = {}) {
  BeamParameters raw = config.empty() ? default_parameters() : load_parameter_file(config);
  return validate_parameters(raw, strict);
}

SearchRegion region_from(const ValidatedParameters& p, const std::vector<double>& r) {
  if (r.empty()) return default_region(p);
  return make_region(p, r[0], r[1], r[2], r[3]);
}

enum class PlotKind { Heatmap, Scatter, ErrorDecay, ShiftRatio };

void write_gnuplot(const std::string& script, const std::string& csv, PlotKind kind) {
  std::ostringstream os;
  os << "# gnuplot companion for " << csv << "\n";
  os << "set datafile separator ','\n";
  switch (kind) {
    case PlotKind::Heatmap:
      os << "set view map\n";
      os << "set xlabel 'Re lambda'\nset ylabel 'Im lambda'\n";
      os << "set cblabel 'log10 |value|'\n";
      os << "splot '" << csv << "' using 1:2:(log10($5)) with points pt 5 ps 0.7 palette notitle\n";
      break;
    case PlotKind::Scatter:
      os << "set xlabel 'Re lambda'\nset ylabel 'Im lambda'\n";
      os << "plot '" << csv << "' using 4:5 with points pt 7 ps 1 notitle\n";
      break;
    case PlotKind::ErrorDecay:
      os << "set logscale xy\n";
      os << "set xlabel 'n'\nset ylabel 'absolute error'\n";
      os << "plot '" << csv << "' using 2:9 with points pt 6 title 'first order', \\\n"
         << "     '" << csv << "' using 2:10 with points pt 7 title 'second order'\n";
      break;
    case PlotKind::ShiftRatio:
      os << "set logscale y\n";
      os << "set xlabel 'n'\nset ylabel 'shift / second-order magnitude'\n";
      os << "plot '" << csv << "' using 2:9 with points pt 7 notitle\n";
      break;
  }
  write_text_atomic(script, os.str());
}

// ---------------------------------------------------------------- validate

struct ValidateOpts {
  std::string config;
  bool require_balanced = false;
  bool require_branch1 = false;
};

int cmd_validate(const ValidateOpts& o) {
  Strictness strict;
  strict.require_balanced = o.require_balanced;
  strict.require_branch1 = o.require_branch1;
  ValidatedParameters p = load_params(o.config, strict);
  DerivedConstants d = derive_constants(p);
  BoundaryConstants bc = boundary_constants(p, d);
  NormEquivalenceConstants nc = norm_equivalence_constants(p);

  std::ostringstream os;
  os << "parameters\n"
     << "  m=" << format_double(p.p.m) << " J=" << format_double(p.p.J)
     << " S=" << format_double(p.p.S) << " E=" << format_double(p.p.E)
     << " G=" << format_double(p.p.G) << " L=" << format_double(p.p.L) << "\n"
     << "  k1=" << format_double(p.p.k1) << " k2=" << format_double(p.p.k2)
     << " Cp=" << format_double(p.p.Cp) << " R=" << format_double(p.p.R)
     << " CD=" << format_double(p.p.CD) << " CI=" << format_double(p.p.CI) << "\n";
  os << "derived\n"
     << "  D=" << format_double(d.D) << " alpha=" << format_double(d.alpha)
     << " beta=" << format_double(d.beta) << " gamma=" << format_double(d.gamma) << "\n"
     << "  a1=" << format_double(d.a1) << " a2=" << format_double(d.a2)
     << " a3=" << format_double(d.a3) << " a4=" << format_double(d.a4) << "\n"
     << "  c1=" << format_double(d.c1) << " c2=" << format_double(d.c2)
     << " c3=" << format_double(d.c3) << " c4=" << format_double(d.c4) << "\n";
  os << "boundary\n"
     << "  d1=" << fmt_cx(bc.d1) << " dhat2=" << fmt_cx(bc.dhat2)
     << " d2=" << fmt_cx(bc.d2) << "\n"
     << "  r11=" << fmt_cx(bc.r11) << " rhat11=" << fmt_cx(bc.rhat11)
     << " rtilde11=" << fmt_cx(bc.rtilde11) << "\n"
     << "  r12=" << fmt_cx(bc.r12) << " rhat12=" << fmt_cx(bc.rhat12)
     << " rhat13=" << fmt_cx(bc.rhat13) << "\n"
     << "  r21=" << fmt_cx(bc.r21) << " r22=" << fmt_cx(bc.r22)
     << " rhat22=" << fmt_cx(bc.rhat22) << " r23=" << fmt_cx(bc.r23) << "\n";
  os << "norm equivalence\n"
     << "  c0=" << format_double(nc.c0) << " c2=" << format_double(nc.c2)
     << " c=" << format_double(nc.c) << " C=" << format_double(nc.C) << "\n";
  os << "circuit pole\n"
     << "  lambda=" << fmt_cx(Cx{0.0, 1.0 / (p.p.Cp * p.p.R)}) << "\n";
  std::cout << os.str();
  std::cout << "validate: ok (D=" << format_double(p.D)
            << ", coupling margin=" << format_double(std::min(p.p.m, p.p.J) - p.p.S) << ")\n";
  return 0;
}

// ------------------------------------------------------------------- roots

struct RootsOpts {
  std::string config;
  std::vector<double> lambda;
  std::string out;
};

int cmd_roots(const RootsOpts& o) {
  ValidatedParameters p = load_params(o.config);
  DerivedConstants d = derive_constants(p);
  const Cx lambda{o.lambda[0], o.lambda[1]};

  CharacteristicRoots exact = characteristic_roots_exact(lambda, d);
  std::optional<CharacteristicRoots> asym;
  try {
    asym = characteristic_roots_asymptotic(lambda, d);
  } catch (const Error&) {
    // |lambda| below the asymptotic validity floor; exact roots still stand.
  }

  const auto [cp, cq] = depressed_cubic_coefficients(lambda, d);
  const double scale =
      std::max({std::pow(std::abs(cp), 1.5), std::abs(cq), 1e-300});

  std::vector<std::vector<std::string>> rows;
  double max_resid = 0.0, max_diff = 0.0;
  for (int j = 0; j < 6; ++j) {
    const Cx ze = exact.zeta[static_cast<std::size_t>(j)];
    const Cx z = ze * ze + (d.alpha / 3.0) * lambda * lambda;
    const double resid = std::abs(z * z * z + cp * z + cq) / scale;
    max_resid = std::max(max_resid, resid);
    std::string ra = "nan", ia = "nan", diff = "nan";
    if (asym) {
      const Cx za = asym->zeta[static_cast<std::size_t>(j)];
      ra = format_double(za.real());
      ia = format_double(za.imag());
      diff = format_double(std::abs(ze - za));
      max_diff = std::max(max_diff, std::abs(ze - za));
    }
    rows.push_back({std::to_string(j + 1), format_double(ze.real()),
                    format_double(ze.imag()), ra, ia, diff, format_double(resid)});
  }

  const std::vector<std::string> cols = {"j",       "re_exact", "im_exact",
                                         "re_asym", "im_asym",  "abs_diff",
                                         "cubic_residual_rel"};
  std::string header = file_header(p.p);
  header += "# lambda=" + fmt_cx(lambda) + "\n";
  const std::string table = csv_table(header, cols, rows);
  if (!o.out.empty())
    write_text_atomic(o.out, table);
  else
    std::cout << table;

  std::cout << "roots: lambda=" << fmt_cx(lambda) << " max_cubic_residual="
            << format_double(max_resid)
            << (asym ? " max_label_diff=" + format_double(max_diff)
                     : std::string(" (asymptotic labels unavailable)"))
            << (exact.degenerate ? " degenerate" : "")
            << (o.out.empty() ? "" : " -> " + o.out) << "\n";
  return 0;
}

// -------------------------------------------------------------- dispersion

struct DispersionOpts {
  std::string config;
  std::vector<double> region;
  std::vector<int> grid{61, 41};
  std::string out;
  std::string gnuplot;
};

int cmd_dispersion(const DispersionOpts& o) {
  ValidatedParameters p = load_params(o.config);
  SearchRegion reg = region_from(p, o.region);
  const int nx = o.grid[0], ny = o.grid[1];
  if (nx < 2 || ny < 2) fail(Err::BadArgument, "grid needs at least 2 x 2 points");

  DispersionEvaluator ev(p);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  int near_pole_count = 0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int iy = 0; iy < ny; ++iy) {
    const double im = reg.im_min + (reg.im_max - reg.im_min) * iy / (ny - 1);
    for (int ix = 0; ix < nx; ++ix) {
      const double re = reg.re_min + (reg.re_max - reg.re_min) * ix / (nx - 1);
      const Cx lambda{re, im};
      Cx value{nan, nan};
      double cond = nan;
      bool near = false;
      try {
        DispersionValue dv = ev(lambda);
        value = dv.value;
        cond = dv.condition;
        near = dv.near_pole;
      } catch (const Error& e) {
        if (e.code() != Err::PoleProximity) throw;
        near = true;
      }
      if (near) ++near_pole_count;
      rows.push_back({format_double(re), format_double(im), format_double(value.real()),
                      format_double(value.imag()), format_double(std::abs(value)),
                      format_double(cond), near ? "1" : "0"});
    }
  }

  const std::vector<std::string> cols = {"re(lambda)", "im(lambda)", "re(value)",
                                         "im(value)",  "abs(value)", "condition",
                                         "near_pole"};
  write_text_atomic(o.out, csv_table(file_header(p.p), cols, rows));
  if (!o.gnuplot.empty()) write_gnuplot(o.gnuplot, o.out, PlotKind::Heatmap);
  std::cout << "dispersion: " << nx << "x" << ny << " samples, " << near_pole_count
            << " near-pole -> " << o.out << "\n";
  return 0;
}

// -------------------------------------------------------------- asymptotic

struct AsymptoticOpts {
  std::string config;
  std::string branch = "both";
  int n_max = 40;
  bool mirrors = false;
  std::string out;
};

int cmd_asymptotic(const AsymptoticOpts& o) {
  ValidatedParameters p = load_params(o.config);
  DerivedConstants d = derive_constants(p);
  BoundaryConstants bc = boundary_constants(p, d);
  const int branch = o.branch == "both" ? 0 : std::stoi(o.branch);

  std::vector<BranchEigenvalue> recs =
      branch_sweep(branch, o.n_max, bc, d, {}, 1e-12, o.mirrors);

  std::vector<std::vector<std::string>> rows;
  int flagged = 0;
  for (const BranchEigenvalue& r : recs) {
    if (r.flagged) ++flagged;
    rows.push_back({std::to_string(r.branch), std::to_string(r.n),
                    format_double(r.lambda_unperturbed.real()),
                    format_double(r.lambda_unperturbed.imag()),
                    format_double(r.correction_w.real()),
                    format_double(r.correction_w.imag()),
                    format_double(r.lambda_perturbed.real()),
                    format_double(r.lambda_perturbed.imag()),
                    r.branch == 1 ? yes_no(r.admissible) : std::string("na")});
  }
  const std::vector<std::string> cols = {"branch", "n",      "re_unpert", "im_unpert",
                                         "re_w",   "im_w",   "re_pert",   "im_pert",
                                         "admissible"};
  const std::string table = csv_table(file_header(p.p), cols, rows);
  if (!o.out.empty())
    write_text_atomic(o.out, table);
  else
    std::cout << table;

  std::cout << "asymptotic: " << rows.size() << " records, " << flagged << " flagged"
            << (o.out.empty() ? "" : " -> " + o.out) << "\n";
  return flagged > 0 ? 2 : 0;
}

// ------------------------------------------------------------------- solve

struct SolveOpts {
  std::string config;
  std::vector<double> region;
  std::string out;
  std::string gnuplot;
  int threads = 0;
  double refine_tol = 1e-10;
  double match_fraction = 0.2;
  bool no_mirrors = false;
  bool no_classify = false;
};

std::vector<std::string> record_row(const EigenvalueRecord& r) {
  return {to_string(r.method),
          r.branch == 0 ? std::string("unclassified") : std::to_string(r.branch),
          r.n == 0 ? std::string() : std::to_string(r.n),
          format_double(r.value.real()),
          format_double(r.value.imag()),
          format_double(r.residual),
          r.admissible.has_value() ? yes_no(*r.admissible) : std::string("na"),
          std::to_string(r.multiplicity)};
}

const std::vector<std::string> kRecordCols = {"method", "branch",   "n",
                                              "re",     "im",       "residual",
                                              "admissible", "multiplicity"};

int cmd_solve(const SolveOpts& o) {
  ValidatedParameters p = load_params(o.config);
  SearchRegion reg = region_from(p, o.region);

  SolveOptions opt;
  opt.threads = o.threads;
  opt.refine_tol = o.refine_tol;
  opt.match_fraction = o.match_fraction;
  opt.append_mirrors = !o.no_mirrors;
  opt.classify = !o.no_classify;

  SpectrumResult res = find_spectrum(reg, p, opt);

  std::vector<std::vector<std::string>> rows;
  int not_ok = 0;
  for (const EigenvalueRecord& r : res.records) {
    if (r.status != RecordStatus::Ok) ++not_ok;
    rows.push_back(record_row(r));
  }
  std::string header = file_header(p.p);
  header += "# region=" + format_double(reg.re_min) + "," + format_double(reg.re_max) +
            "," + format_double(reg.im_min) + "," + format_double(reg.im_max) + "\n";
  write_text_atomic(o.out, csv_table(header, kRecordCols, rows));
  if (!o.gnuplot.empty()) write_gnuplot(o.gnuplot, o.out, PlotKind::Scatter);

  const bool partial = res.unresolved_boxes > 0 || not_ok > 0;
  std::cout << "solve: " << rows.size() << " records (contour count " << res.total_count
            << ", unresolved boxes " << res.unresolved_boxes << ", non-converged "
            << not_ok << ") -> " << o.out << "\n";
  return partial ? 2 : 0;
}

// ----------------------------------------------------------------- compare

struct CompareOpts {
  std::string config;
  std::string branch = "both";
  int n_max = 30;
  int n_max_2 = 10;
  std::string out;
  std::string gnuplot;
};

int cmd_compare(const CompareOpts& o) {
  ValidatedParameters p = load_params(o.config);
  DerivedConstants d = derive_constants(p);
  BoundaryConstants bc = boundary_constants(p, d);

  std::vector<int> branches;
  if (o.branch == "both" || o.branch == "1") branches.push_back(1);
  if (o.branch == "both" || o.branch == "2") branches.push_back(2);

  std::vector<std::vector<std::string>> rows;
  std::ostringstream footer;
  std::ostringstream summary;
  bool any_matched = false;

  for (int branch : branches) {
    const int n_hi = branch == 1 ? o.n_max : o.n_max_2;
    std::vector<double> ns, e1s, e2s;
    int matched = 0, second_wins = 0, counted = 0;
    for (int n = 1; n <= n_hi; ++n) {
      BranchEigenvalue be = branch == 1 ? perturbed_branch1(n, bc, d)
                                        : perturbed_branch2(n, 1e-12, bc, d);
      if (be.flagged) continue;
      std::optional<EigenvalueRecord> rec = find_branch_root(p, branch, n);
      if (!rec) continue;
      ++matched;
      const double err1 = std::abs(rec->value - be.lambda_unperturbed);
      const double err2 = std::abs(rec->value - be.lambda_perturbed);
      if (branch == 2 || n >= 10) {
        ++counted;
        if (err2 < err1) ++second_wins;
      }
      rows.push_back({std::to_string(branch), std::to_string(n),
                      format_double(rec->value.real()), format_double(rec->value.imag()),
                      format_double(be.lambda_unperturbed.real()),
                      format_double(be.lambda_unperturbed.imag()),
                      format_double(be.lambda_perturbed.real()),
                      format_double(be.lambda_perturbed.imag()), format_double(err1),
                      format_double(err2)});
      if (branch == 2 || n >= 10) {
        ns.push_back(n);
        e1s.push_back(err1);
        e2s.push_back(err2);
      }
    }
    LogFit f1 = fit_power_law(ns, e1s);
    LogFit f2 = fit_power_law(ns, e2s);
    footer << "# branch=" << branch << " matched=" << matched << "/" << n_hi
           << " err_first_exponent=" << format_double(f1.exponent)
           << " err_second_exponent=" << format_double(f2.exponent) << "\n";
    summary << " branch" << branch << ": " << matched << "/" << n_hi
            << " matched, second-order better " << second_wins << "/" << counted
            << ", second exponent " << format_double(f2.exponent) << ";";
    if (matched > 0) any_matched = true;
  }

  const std::vector<std::string> cols = {"branch",   "n",         "re_num",
                                         "im_num",   "re_first",  "im_first",
                                         "re_second", "im_second", "err_first",
                                         "err_second"};
  std::string table = csv_table(file_header(p.p), cols, rows);
  table += footer.str();
  if (!o.out.empty())
    write_text_atomic(o.out, table);
  else
    std::cout << table;
  if (!o.out.empty() && !o.gnuplot.empty()) write_gnuplot(o.gnuplot, o.out, PlotKind::ErrorDecay);

  std::cout << "compare:" << summary.str()
            << (o.out.empty() ? "" : " -> " + o.out) << "\n";
  return any_matched ? 0 : 2;
}

// ----------------------------------------------------------------- perturb

struct PerturbOpts {
  std::string config;
  std::string piezo_grid;
  std::string out;
  std::string gnuplot;
  std::vector<int> b1{10, 25};
  std::vector<int> b2{1, 10};
};

std::vector<PiezoSet> parse_piezo_grid(std::istream& in) {
  std::vector<PiezoSet> grid;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    PiezoSet s;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ls >> s.Cp >> c1 >> s.R >> c2 >> s.CD >> c3 >> s.CI) || c1 != ',' ||
        c2 != ',' || c3 != ',')
      fail(Err::BadValue,
           "piezo grid line " + std::to_string(lineno) + ": expected Cp,R,CD,CI");
    std::string rest;
    if (ls >> rest) fail(Err::BadValue, "piezo grid line " + std::to_string(lineno) +
                                            ": trailing content '" + rest + "'");
    grid.push_back(s);
  }
  if (grid.size() < 2)
    fail(Err::BadValue, "piezo grid needs a baseline plus at least one perturbed set");
  return grid;
}

int cmd_perturb(const PerturbOpts& o) {
  BeamParameters mech = o.config.empty() ? default_parameters() : load_parameter_file(o.config);
  std::ifstream in(o.piezo_grid);
  if (!in) fail(Err::BadArgument, "cannot open piezo grid: " + o.piezo_grid);
  std::vector<PiezoSet> grid = parse_piezo_grid(in);

  SweepRanges ranges;
  ranges.b1_lo = o.b1[0];
  ranges.b1_hi = o.b1[1];
  ranges.b2_lo = o.b2[0];
  ranges.b2_hi = o.b2[1];

  std::vector<PerturbationReport> reports = perturbation_sweep(mech, grid, ranges);

  std::ostringstream os;
  os << file_header(mech);
  os << "# baseline Cp=" << format_double(grid[0].Cp) << " R=" << format_double(grid[0].R)
     << " CD=" << format_double(grid[0].CD) << " CI=" << format_double(grid[0].CI) << "\n";
  os << "branch,n,re_base,im_base,re_pert,im_pert,shift,second_order_mag,ratio\n";
  std::size_t pairs_total = 0;
  for (const PerturbationReport& rep : reports) {
    os << "# perturbed Cp=" << format_double(rep.perturbed.Cp)
       << " R=" << format_double(rep.perturbed.R)
       << " CD=" << format_double(rep.perturbed.CD)
       << " CI=" << format_double(rep.perturbed.CI) << "\n";
    for (const PerturbationPair& pr : rep.pairs) {
      os << pr.branch << "," << pr.n << "," << format_double(pr.lambda_base.real()) << ","
         << format_double(pr.lambda_base.imag()) << ","
         << format_double(pr.lambda_pert.real()) << ","
         << format_double(pr.lambda_pert.imag()) << "," << format_double(pr.shift) << ","
         << format_double(pr.second_order_mag) << "," << format_double(pr.ratio) << "\n";
    }
    pairs_total += rep.pairs.size();
    os << "# fits branch1_shift_exponent=" << format_double(rep.branch1_shift_exponent)
       << " branch1_second_exponent=" << format_double(rep.branch1_second_exponent)
       << " branch2_shift_exponent=" << format_double(rep.branch2_shift_exponent)
       << " branch2_second_exponent=" << format_double(rep.branch2_second_exponent)
       << "\n";
  }
  write_text_atomic(o.out, os.str());
  if (!o.gnuplot.empty()) write_gnuplot(o.gnuplot, o.out, PlotKind::ShiftRatio);

  std::cout << "perturb: " << reports.size() << " perturbed sets, " << pairs_total
            << " matched pairs -> " << o.out << "\n";
  return 0;
}

// ------------------------------------------------------------------ checks

struct ChecksOpts {
  std::string config;
  int samples = 100;
  int grid_points = 64;
  unsigned long long seed = 20240816ull;
  std::vector<double> region;
  std::string out = "checks_report.json";
  bool skip_spectrum = false;
};

struct CheckEntry {
  std::string name;
  bool pass = false;
  json measured;
  json tolerance;
  std::vector<std::string> issues;
};

int cmd_checks(const ChecksOpts& o) {
  ValidatedParameters p = load_params(o.config);
  std::vector<CheckEntry> entries;

  {
    NormEquivalenceReport rep =
        norm_equivalence_check(o.samples, p, o.grid_points, o.seed);
    CheckEntry e;
    e.name = "norm_equivalence";
    e.pass = rep.violations == 0;
    e.measured = {{"samples", rep.samples},
                  {"violations", rep.violations},
                  {"worst_lower_margin", rep.worst_lower_margin},
                  {"worst_upper_margin", rep.worst_upper_margin},
                  {"c", rep.constants.c},
                  {"C", rep.constants.C}};
    e.tolerance = {{"violations", 0}};
    e.issues = rep.issues;
    entries.push_back(std::move(e));
  }

  {
    // Inner-product algebra on random admissible states.
    std::mt19937_64 rng(o.seed + 1);
    const int pairs = 20;
    double worst_herm = 0.0, worst_lin = 0.0, worst_cs = 0.0;
    double min_rayleigh = std::numeric_limits<double>::infinity();
    for (int k = 0; k < pairs; ++k) {
      StateFunction f = random_admissible_state(48, p.p.L, rng);
      StateFunction g = random_admissible_state(48, p.p.L, rng);
      StateFunction h = random_admissible_state(48, p.p.L, rng);
      const Cx fg = energy_inner_product(f, g, p);
      const Cx gf = energy_inner_product(g, f, p);
      const double ff = energy_inner_product(f, f, p).real();
      const double gg = energy_inner_product(g, g, p).real();
      const double scale = std::sqrt(ff * gg) + 1.0;
      worst_herm = std::max(worst_herm, std::abs(fg - std::conj(gf)) / scale);
      std::uniform_real_distribution<double> U(-1.0, 1.0);
      const Cx a{U(rng), U(rng)}, b{U(rng), U(rng)};
      StateFunction lin = scaled(f, a);
      axpy(lin, b, h);
      const Cx lhs = energy_inner_product(lin, g, p);
      const Cx rhs = a * fg + b * energy_inner_product(h, g, p);
      worst_lin = std::max(worst_lin, std::abs(lhs - rhs) / scale);
      worst_cs = std::max(worst_cs, std::norm(fg) / (ff * gg) - 1.0);
      min_rayleigh = std::min(min_rayleigh, ff / product_norm1(f));
    }
    CheckEntry herm{"inner_product_hermitian", worst_herm <= 1e-10,
                    json{{"worst_relative_asymmetry", worst_herm}},
                    json{{"max", 1e-10}}, {}};
    CheckEntry lin{"inner_product_linear", worst_lin <= 1e-10,
                   json{{"worst_relative_defect", worst_lin}},
                   json{{"max", 1e-10}}, {}};
    CheckEntry cs{"cauchy_schwarz", worst_cs <= 1e-10,
                  json{{"worst_quotient_excess", worst_cs}},
                  json{{"max", 1e-10}}, {}};
    CheckEntry pos{"positive_definite",
                   min_rayleigh > 0.0,
                   json{{"min_rayleigh_quotient", min_rayleigh}},
                   json{{"min", "positive"}},
                   {}};
    entries.push_back(std::move(herm));
    entries.push_back(std::move(lin));
    entries.push_back(std::move(cs));
    entries.push_back(std::move(pos));
  }

  if (!o.skip_spectrum) {
    SearchRegion reg = region_from(p, o.region);
    SolveOptions sopt;
    SpectrumResult res = find_spectrum(reg, p, sopt);
    SpectrumPropertyReport rep = spectrum_property_check(res.records, p);

    int not_ok = 0;
    for (const EigenvalueRecord& r : res.records)
      if (r.status != RecordStatus::Ok) ++not_ok;
    entries.push_back({"all_roots_converged",
                       res.unresolved_boxes == 0 && not_ok == 0,
                       json{{"records", res.records.size()},
                            {"unresolved_boxes", res.unresolved_boxes},
                            {"non_converged", not_ok}},
                       json{{"unresolved_boxes", 0}, {"non_converged", 0}},
                       {}});
    entries.push_back({"mirror_closure", rep.mirror_ok, json{{"ok", rep.mirror_ok}},
                       json{{"relative", 1e-6}}, rep.issues});
    entries.push_back({"imaginary_parts_positive",
                       rep.imaginary_ok || !rep.imaginary_applicable,
                       json{{"applicable", rep.imaginary_applicable}},
                       json{{"min_im", 1e-9}},
                       {}});
    entries.push_back({"pole_exclusion", rep.pole_ok, json{{"ok", rep.pole_ok}},
                       json{{"min_distance", 5.0 * kPoleRadius}}, {}});
    entries.push_back({"piezo_invariance", rep.piezo_invariance_ok,
                       json{{"ok", rep.piezo_invariance_ok}},
                       json{{"difference", 0.0}},
                       {}});

    double min_spacing = std::numeric_limits<double>::infinity();
    double max_mod = 1.0;
    for (std::size_t i = 0; i < res.records.size(); ++i) {
      if (res.records[i].status != RecordStatus::Ok) continue;
      max_mod = std::max(max_mod, std::abs(res.records[i].value));
      for (std::size_t j = i + 1; j < res.records.size(); ++j) {
        if (res.records[j].status != RecordStatus::Ok) continue;
        min_spacing =
            std::min(min_spacing, std::abs(res.records[i].value - res.records[j].value));
      }
    }
    const double spacing_floor = 10.0 * sopt.refine_tol * max_mod;
    entries.push_back({"minimum_spacing", min_spacing > spacing_floor,
                       json{{"min_spacing", min_spacing}},
                       json{{"min", spacing_floor}},
                       {}});
  }

  int passed = 0;
  for (const CheckEntry& e : entries) {
    std::printf("%-28s %s\n", e.name.c_str(), e.pass ? "PASS" : "FAIL");
    if (!e.pass)
      for (const std::string& msg : e.issues) std::printf("    %s\n", msg.c_str());
    if (e.pass) ++passed;
  }

  json report;
  report["version"] = std::string(kVersion);
  report["parameters"] = {{"m", p.p.m},   {"J", p.p.J},   {"S", p.p.S},
                          {"E", p.p.E},   {"G", p.p.G},   {"L", p.p.L},
                          {"k1", p.p.k1}, {"k2", p.p.k2}, {"Cp", p.p.Cp},
                          {"R", p.p.R},   {"CD", p.p.CD}, {"CI", p.p.CI}};
  report["checks"] = json::array();
  for (const CheckEntry& e : entries) {
    json je;
    je["name"] = e.name;
    je["pass"] = e.pass;
    je["measured"] = e.measured;
    je["tolerance"] = e.tolerance;
    if (!e.issues.empty()) je["issues"] = e.issues;
    report["checks"].push_back(je);
  }
  write_text_atomic(o.out, report.dump(2) + "\n");

  std::cout << "checks: " << passed << "/" << entries.size() << " passed -> " << o.out
            << "\n";
  return passed == static_cast<int>(entries.size()) ? 0 : 2;
}

// ------------------------------------------------------------ inverse-check

struct InverseOpts {
  std::string config;
  int points = 512;
  int samples = 20;
  int nodes = 48;
  unsigned long long seed = 20240816ull;
  std::string out;
};

int cmd_inverse_check(const InverseOpts& o) {
  ValidatedParameters p = load_params(o.config);

  std::mt19937_64 rng(o.seed);
  double max_ratio = 0.0;
  for (int k = 0; k < o.samples; ++k) {
    StateFunction g = random_admissible_state(o.points, p.p.L, rng);
    StateFunction f = apply_inverse(g, p);
    StateFunction r = apply_forward(f, p);
    axpy(r, Cx{-1.0, 0.0}, g);
    max_ratio = std::max(max_ratio, std::sqrt(product_norm1(r) / product_norm1(g)));
  }
  const double resid_tol = 1e-7;
  const bool resid_ok = max_ratio <= resid_tol;
  std::cout << "forward residual: max |A f - g|_1 / |g|_1 = " << format_double(max_ratio)
            << " over " << o.samples << " states at " << o.points << " points ("
            << (resid_ok ? "ok" : "FAIL") << ", tol " << format_double(resid_tol)
            << ")\n";

  CollocationMode mode = collocation_lowest_mode(p, o.nodes);
  PowerIterationResult pi = inverse_power_iteration(mode.state, p, 6);
  const double agree = std::abs(pi.lambda - mode.lambda) / std::abs(mode.lambda);
  const double agree_tol = 1e-6;
  const bool agree_ok = agree <= agree_tol;
  std::cout << "power iteration: lambda=" << fmt_cx(pi.lambda) << " vs collocation "
            << fmt_cx(mode.lambda) << ", relative difference " << format_double(agree)
            << " (" << (agree_ok ? "ok" : "FAIL") << ", tol " << format_double(agree_tol)
            << ", drift " << format_double(pi.drift) << ")\n";

  if (!o.out.empty()) {
    json report;
    report["version"] = std::string(kVersion);
    report["points"] = o.points;
    report["samples"] = o.samples;
    report["max_forward_residual"] = max_ratio;
    report["forward_residual_tolerance"] = resid_tol;
    report["power_iteration_lambda"] = {pi.lambda.real(), pi.lambda.imag()};
    report["collocation_lambda"] = {mode.lambda.real(), mode.lambda.imag()};
    report["relative_difference"] = agree;
    report["relative_difference_tolerance"] = agree_tol;
    report["drift"] = pi.drift;
    write_text_atomic(o.out, report.dump(2) + "\n");
  }

  const bool ok = resid_ok && agree_ok;
  std::cout << "inverse-check: " << (ok ? "ok" : "FAIL")
            << (o.out.empty() ? "" : " -> " + o.out) << "\n";
  return ok ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"coupled bending-torsion energy-harvester spectrum toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::function<int()> action;

  auto add_config = [](CLI::App* cmd, std::string& slot) {
    cmd->add_option("--config", slot, "parameter file (key = value, keys m J S E G L k1 k2 Cp R CD CI)")
        ->check(CLI::ExistingFile);
  };
  auto add_region = [](CLI::App* cmd, std::vector<double>& slot) {
    cmd->add_option("--region", slot,
                    "spectral window re_min,re_max,im_min,im_max (default 0.3,120,-0.5,8)")
        ->delimiter(',')
        ->expected(4);
  };

  ValidateOpts vo;
  {
    CLI::App* c = app.add_subcommand("validate", "check a parameter set and print derived constants");
    add_config(c, vo.config);
    c->add_flag("--require-balanced", vo.require_balanced, "insist on CI = -CD");
    c->add_flag("--require-branch1", vo.require_branch1, "insist on k2 > G a1");
    c->callback([&] { action = [&] { return cmd_validate(vo); }; });
  }

  RootsOpts ro;
  {
    CLI::App* c = app.add_subcommand("roots", "characteristic roots at one lambda, exact vs asymptotic");
    add_config(c, ro.config);
    c->add_option("--lambda", ro.lambda, "complex lambda as re,im")
        ->delimiter(',')
        ->expected(2)
        ->required();
    c->add_option("--out", ro.out, "write CSV here instead of stdout");
    c->callback([&] { action = [&] { return cmd_roots(ro); }; });
  }

  DispersionOpts dop;
  {
    CLI::App* c = app.add_subcommand("dispersion", "sample the dispersion determinant on a grid");
    add_config(c, dop.config);
    add_region(c, dop.region);
    c->add_option("--grid", dop.grid, "samples nx,ny (default 61,41)")
        ->delimiter(',')
        ->expected(2);
    c->add_option("--out", dop.out, "output CSV")->required();
    c->add_option("--gnuplot-script", dop.gnuplot, "write a companion gnuplot script");
    c->callback([&] { action = [&] { return cmd_dispersion(dop); }; });
  }

  AsymptoticOpts ao;
  {
    CLI::App* c = app.add_subcommand("asymptotic", "branch eigenvalue formulas with corrections");
    add_config(c, ao.config);
    c->add_option("--branch", ao.branch, "1, 2, or both")
        ->check(CLI::IsMember({"1", "2", "both"}));
    c->add_option("--n-max", ao.n_max, "largest index n (default 40)")
        ->check(CLI::PositiveNumber);
    c->add_flag("--mirrors", ao.mirrors, "append mirror records (Re < 0)");
    c->add_option("--out", ao.out, "write CSV here instead of stdout");
    c->callback([&] { action = [&] { return cmd_asymptotic(ao); }; });
  }

  SolveOpts so;
  {
    CLI::App* c = app.add_subcommand("solve", "find all eigenvalues in a spectral window");
    add_config(c, so.config);
    add_region(c, so.region);
    c->add_option("--out", so.out, "output CSV")->required();
    c->add_option("--gnuplot-script", so.gnuplot, "write a companion gnuplot script");
    c->add_option("--threads", so.threads, "worker threads (0 = hardware)");
    c->add_option("--refine-tol", so.refine_tol, "relative residual target (default 1e-10)");
    c->add_option("--match-fraction", so.match_fraction,
                  "classification radius as a fraction of branch spacing");
    c->add_flag("--no-mirrors", so.no_mirrors, "skip appending Re<0 mirror records");
    c->add_flag("--no-classify", so.no_classify, "skip branch classification");
    c->callback([&] { action = [&] { return cmd_solve(so); }; });
  }

  CompareOpts co;
  {
    CLI::App* c = app.add_subcommand("compare", "numeric roots vs first/second-order branch formulas");
    add_config(c, co.config);
    c->add_option("--branch", co.branch, "1, 2, or both")
        ->check(CLI::IsMember({"1", "2", "both"}));
    c->add_option("--n-max", co.n_max, "largest branch-1 index (default 30)")
        ->check(CLI::PositiveNumber);
    c->add_option("--n-max-2", co.n_max_2, "largest branch-2 index (default 10)")
        ->check(CLI::PositiveNumber);
    c->add_option("--out", co.out, "write CSV here instead of stdout");
    c->add_option("--gnuplot-script", co.gnuplot, "write a companion gnuplot script");
    c->callback([&] { action = [&] { return cmd_compare(co); }; });
  }

  PerturbOpts po;
  {
    CLI::App* c = app.add_subcommand("perturb", "eigenvalue drift under piezo-parameter changes");
    add_config(c, po.config);
    c->add_option("--piezo-grid", po.piezo_grid,
                  "file of Cp,R,CD,CI lines; first line is the baseline")
        ->check(CLI::ExistingFile)
        ->required();
    c->add_option("--out", po.out, "output CSV")->required();
    c->add_option("--gnuplot-script", po.gnuplot, "write a companion gnuplot script");
    c->add_option("--b1", po.b1, "branch-1 index range lo,hi (default 10,25)")
        ->delimiter(',')
        ->expected(2);
    c->add_option("--b2", po.b2, "branch-2 index range lo,hi (default 1,10)")
        ->delimiter(',')
        ->expected(2);
    c->callback([&] { action = [&] { return cmd_perturb(po); }; });
  }

  ChecksOpts cko;
  {
    CLI::App* c = app.add_subcommand("checks", "run the verification suite and write a JSON report");
    add_config(c, cko.config);
    add_region(c, cko.region);
    c->add_option("--samples", cko.samples, "random states for the norm checks (default 100)")
        ->check(CLI::PositiveNumber);
    c->add_option("--grid-points", cko.grid_points, "grid size for random states (default 64)");
    c->add_option("--seed", cko.seed, "RNG seed");
    c->add_option("--out", cko.out, "JSON report path (default checks_report.json)");
    c->add_flag("--skip-spectrum", cko.skip_spectrum, "norm/inner-product checks only");
    c->callback([&] { action = [&] { return cmd_checks(cko); }; });
  }

  InverseOpts io;
  {
    CLI::App* c = app.add_subcommand("inverse-check",
                                     "explicit inverse vs forward operator and collocation");
    add_config(c, io.config);
    c->add_option("--points", io.points, "grid points for residual states (default 512)");
    c->add_option("--samples", io.samples, "number of random states (default 20)");
    c->add_option("--collocation-nodes", io.nodes, "nodes for the reference mode (default 48)");
    c->add_option("--seed", io.seed, "RNG seed");
    c->add_option("--out", io.out, "optional JSON report path");
    c->callback([&] { action = [&] { return cmd_inverse_check(io); }; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    return action ? action() : 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace harvester
