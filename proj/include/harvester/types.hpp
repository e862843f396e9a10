#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace harvester {

using Cx = std::complex<double>;

inline constexpr const char* kVersion = "0.1.0";

// Failure identifiers. Validation problems and numerical breakdowns carry one
// of these so callers (and tests) can react to the cause, not the message text.
enum class Err {
  NonPositiveParameter,
  CouplingTooStrong,
  BalancedPiezoViolated,
  Branch1ConditionViolated,
  MissingKey,
  UnknownKey,
  BadValue,
  DegenerateDenominator,
  SingularA1,
  SingularA3,
  PoleProximity,
  G1TooSmall,
  G2TooSmall,
  NewtonDivergence,
  BoundaryZero,
  PhaseUndersampled,
  NotConverged,
  Unresolved,
  ResolutionInsufficient,
  GridTooCoarse,
  GridMismatch,
  MatchingFailed,
  BadArgument,
};

const char* to_string(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  Err code() const noexcept { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

}  // namespace harvester
