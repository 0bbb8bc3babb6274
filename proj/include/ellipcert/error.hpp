#pragma once

#include <stdexcept>
#include <string>

namespace ellipcert {

/// Failure categories shared by every module. The names are stable: they are
/// written verbatim into certificates and CLI diagnostics.
enum class ErrorKind {
  DivByZeroInterval,
  NegativeSqrt,
  EmptyIntersection,
  NonFinite,
  ParseError,
  InvalidArgument,
  QuadratureCertFail,
  NonPolynomialIntegrand,
  NewtonDiverged,
  NotSPD,
  EnclosureFail,
  NotCoercive,
  PossiblySingular,
  KantorovichFail,
  StrategyInapplicable,
  ConstantUnavailable,
  Assumption4Unverified,
  Mu1NotPositive,
  SupersetDoesNotCover,
  Indeterminate,
  NoPositiveSolution,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ellipcert
