#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace unwind {

enum class ErrorCode {
  DimensionMismatch,
  NonFinite,
  NonDiagonalizable,
  NotHermitian,
  SingularEigenvalue,
  NegativeRealEigenvalue,
  NegativeRate,
  NotHermiticityPreserving,
  NotTracePreserving,
  StepCountInvalid,
  ToleranceNotMet,
  LambdaOutOfRange,
  UnmatchedPair,
  NotInvertible,
  CapExceeded,
  EtaOutOfRange,
  CardinalityOverflow,
  ConfigInvalid,
  IndexOutOfRange,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace unwind
