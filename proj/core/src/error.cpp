#include "citopt/error.hpp"

namespace citopt {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveBound: return "NonPositiveBound";
    case ErrorCode::InfiniteControlBound: return "InfiniteControlBound";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotInFeasibleBox: return "NotInFeasibleBox";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorCode::NegativeY3: return "NegativeY3";
    case ErrorCode::OnNoChatterCurve: return "OnNoChatterCurve";
    case ErrorCode::DisplacementTooSmall: return "DisplacementTooSmall";
    case ErrorCode::CruiseImpossible: return "CruiseImpossible";
    case ErrorCode::SubPlannerFailure: return "SubPlannerFailure";
    case ErrorCode::OrderViolated: return "OrderViolated";
    case ErrorCode::InvalidJunctionPair: return "InvalidJunctionPair";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace citopt
