#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tpshock {

enum class ErrorKind {
  EqualStates,
  NoBracket,
  NotMonotone,
  CflViolation,
  IncomingViolated,
  DomainTooShort,
  NoTransition,
  NotCoincided,
  NonConvexTransformed,
  OleinikViolated,
  DegenerateShock,
  NonIncomingMean,
  TruncationOverflow,
  NotContracting,
  NoRoot,
  DenominatorNearZero,
  ShiftDiverged,
  ConfigInvalid,
  NonMonotoneErrors,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tpshock
