#pragma once

#include <stdexcept>
#include <string>

namespace citopt {

enum class ErrorCode {
  NonPositiveBound,
  InfiniteControlBound,
  LengthMismatch,
  ParseError,
  OrderMismatch,
  NoConvergence,
  NotInFeasibleBox,
  Infeasible,
  ParamOutOfRange,
  NegativeY3,
  OnNoChatterCurve,
  DisplacementTooSmall,
  CruiseImpossible,
  SubPlannerFailure,
  OrderViolated,
  InvalidJunctionPair,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

// Every failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace citopt
