#include "harvester/model.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace harvester {

const char* to_string(Err e) {
  switch (e) {
    case Err::NonPositiveParameter: return "NonPositiveParameter";
    case Err::CouplingTooStrong: return "CouplingTooStrong";
    case Err::BalancedPiezoViolated: return "BalancedPiezoViolated";
    case Err::Branch1ConditionViolated: return "Branch1ConditionViolated";
    case Err::MissingKey: return "MissingKey";
    case Err::UnknownKey: return "UnknownKey";
    case Err::BadValue: return "BadValue";
    case Err::DegenerateDenominator: return "DegenerateDenominator";
    case Err::SingularA1: return "SingularA1";
    case Err::SingularA3: return "SingularA3";
    case Err::PoleProximity: return "PoleProximity";
    case Err::G1TooSmall: return "G1TooSmall";
    case Err::G2TooSmall: return "G2TooSmall";
    case Err::NewtonDivergence: return "NewtonDivergence";
    case Err::BoundaryZero: return "BoundaryZero";
    case Err::PhaseUndersampled: return "PhaseUndersampled";
    case Err::NotConverged: return "NotConverged";
    case Err::Unresolved: return "Unresolved";
    case Err::ResolutionInsufficient: return "ResolutionInsufficient";
    case Err::GridTooCoarse: return "GridTooCoarse";
    case Err::GridMismatch: return "GridMismatch";
    case Err::MatchingFailed: return "MatchingFailed";
    case Err::BadArgument: return "BadArgument";
  }
  return "UnknownError";
}

BeamParameters default_parameters() {
  BeamParameters p{};
  p.m = 1.0;
  p.J = 1.0;
  p.S = 0.3;
  p.E = 1.0;
  p.G = 1.0;
  p.L = 1.0;
  p.k1 = 0.5;
  p.k2 = 2.0;
  p.Cp = 1.0;
  p.R = 1.0;
  p.CD = -0.1;
  p.CI = 0.1;
  return p;
}

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    fail(Err::NonPositiveParameter, std::string(name) + " must be positive and finite");
}

}  // namespace

ValidatedParameters validate_parameters(const BeamParameters& raw, Strictness strict) {
  require_positive(raw.m, "m");
  require_positive(raw.J, "J");
  require_positive(raw.E, "E");
  require_positive(raw.G, "G");
  require_positive(raw.L, "L");
  require_positive(raw.k1, "k1");
  require_positive(raw.k2, "k2");
  require_positive(raw.Cp, "Cp");
  require_positive(raw.R, "R");
  if (!std::isfinite(raw.S) || raw.S < 0.0)
    fail(Err::NonPositiveParameter, "S must be nonnegative and finite");
  if (!std::isfinite(raw.CD) || raw.CD >= 0.0)
    fail(Err::NonPositiveParameter, "CD must be negative and finite");
  if (!std::isfinite(raw.CI) || raw.CI <= 0.0)
    fail(Err::NonPositiveParameter, "CI must be positive and finite");

  if (raw.S >= raw.m || raw.S >= raw.J)
    fail(Err::CouplingTooStrong, "weak coupling requires S < min(m, J)");

  if (strict.require_balanced && raw.CI != -raw.CD)
    fail(Err::BalancedPiezoViolated, "strict mode requires CI == -CD");
  if (strict.require_branch1 && !(raw.k2 > std::sqrt(raw.G * raw.J)))
    fail(Err::Branch1ConditionViolated, "strict mode requires k2 > sqrt(G*J)");

  ValidatedParameters v;
  v.p = raw;
  v.D = raw.m * raw.J - raw.S * raw.S;
  if (!(v.D > 0.0)) fail(Err::CouplingTooStrong, "m*J - S^2 must be positive");
  return v;
}

DerivedConstants derive_constants(const ValidatedParameters& v) {
  const auto& p = v.p;
  DerivedConstants d{};
  d.D = v.D;
  d.alpha = p.J / p.G;
  d.beta = p.m / p.E;
  d.gamma = v.D / (p.E * p.G);
  d.a1 = std::sqrt(p.J / p.G);
  d.a2 = std::pow(p.G, 1.5) * p.S * p.S / (2.0 * p.E * std::pow(p.J, 2.5));
  d.a3 = std::pow(v.D / (p.E * p.J), 0.25);
  d.a4 = p.G * p.S * p.S /
         (4.0 * std::pow(p.E, 0.75) * std::pow(p.J, 1.75) * std::pow(v.D, 0.25));
  d.c1 = d.a1 * p.L;
  d.c2 = d.a2 * p.L;
  d.c3 = d.a3 * p.L;
  d.c4 = d.a4 * p.L;
  return d;
}

BoundaryConstants boundary_constants(const ValidatedParameters& v, const DerivedConstants& d) {
  const auto& p = v.p;
  const Cx i(0.0, 1.0);
  const double a1 = d.a1, a3 = d.a3;
  const double ga1k2 = p.G * a1 + p.k2;
  const double ea34m = p.E * std::pow(a3, 4) - p.m;  // equals -S^2/J
  const double r22_den = p.E * p.E * a1 * std::pow(a3, 4) * ga1k2 - p.k1 * p.k2 * ea34m;

  if (std::abs(ga1k2) < 1e-14 * (p.G * a1 + std::abs(p.k2)))
    fail(Err::DegenerateDenominator, "G*a1 + k2 vanished");
  if (std::abs(r22_den) <
      1e-14 * (p.E * p.E * a1 * std::pow(a3, 4) * ga1k2 + std::abs(p.k1 * p.k2 * ea34m)))
    fail(Err::DegenerateDenominator, "r22 denominator vanished");

  BoundaryConstants b{};
  b.d1 = (1.0 - i) * p.E * a3 / (2.0 * p.k1) +
         (i - 1.0) * p.k2 * ea34m / (2.0 * p.E * a1 * a3 * a3 * a3 * ga1k2);
  b.dhat2 = i * p.CI * p.CD / (p.k1 * p.Cp) +
            i * p.k2 * ea34m / (p.k1 * a1 * a3 * a3 * ga1k2);
  b.d2 = b.d1 * b.d1 - b.dhat2;

  b.r11 = 2.0 * p.k2 / ga1k2;
  b.rhat11 = (1.0 - i) * p.E * a3 / (2.0 * p.k1) - b.d1;
  b.rtilde11 = i * p.CI * p.CD / (p.k1 * p.Cp) -
               (1.0 - i) * p.E * a3 * b.d1 / (2.0 * p.k1) + b.d2;
  b.r12 = -2.0 * p.k2 * ea34m / (p.E * std::pow(a1, 4) * ga1k2);
  b.rhat12 = i * p.E * a3 / p.k1 + b.d1;
  b.rhat13 = p.E * a3 / p.k1 - b.d1;
  b.r21 = p.k2 * a1 * a1 * a1 / (a3 * a3 * a3 * ga1k2);
  b.r22 = r22_den / (p.E * p.k1 * a1 * a3 * a3 * a3 * ga1k2);
  b.rhat22 = i * 2.0 * p.E * p.k2 * a3 * ea34m / r22_den;
  b.r23 = (p.E * p.E * a1 * std::pow(a3, 4) * ga1k2 + p.k1 * p.k2 * ea34m) /
          (p.E * p.k1 * a1 * a3 * a3 * a3 * ga1k2);
  return b;
}

namespace {

const char* const kKeys[12] = {"m", "J", "S", "E", "G", "L", "k1", "k2", "Cp", "R", "CD", "CI"};

double parse_decimal(const std::string& key, const std::string& text) {
  const char* s = text.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  while (end && *end == ' ') ++end;
  if (end == s || (end && *end != '\0'))
    fail(Err::BadValue, "key '" + key + "' has non-numeric value '" + text + "'");
  return v;
}

}  // namespace

BeamParameters parse_parameter_file(std::istream& in) {
  std::map<std::string, double> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);

    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(Err::BadValue, "line " + std::to_string(lineno) + " is not key=value");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      auto a = s.find_first_not_of(" \t");
      auto b = s.find_last_not_of(" \t");
      s = (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
    };
    trim(key);
    trim(val);

    bool known = false;
    for (const char* k : kKeys) known = known || key == k;
    if (!known) fail(Err::UnknownKey, "unknown parameter key '" + key + "'");
    if (seen.count(key)) fail(Err::BadValue, "duplicate parameter key '" + key + "'");
    seen[key] = parse_decimal(key, val);
  }
  for (const char* k : kKeys)
    if (!seen.count(k)) fail(Err::MissingKey, "parameter file missing key '" + std::string(k) + "'");

  BeamParameters p{};
  p.m = seen["m"];
  p.J = seen["J"];
  p.S = seen["S"];
  p.E = seen["E"];
  p.G = seen["G"];
  p.L = seen["L"];
  p.k1 = seen["k1"];
  p.k2 = seen["k2"];
  p.Cp = seen["Cp"];
  p.R = seen["R"];
  p.CD = seen["CD"];
  p.CI = seen["CI"];
  return p;
}

BeamParameters load_parameter_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::BadValue, "cannot open parameter file '" + path + "'");
  return parse_parameter_file(in);
}

}  // namespace harvester
