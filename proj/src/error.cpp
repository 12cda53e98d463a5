#include "persid/error.hpp"

namespace persid {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kSplitInfeasible: return "SplitInfeasible";
    case ErrorCode::kSplitViolation: return "SplitViolation";
    case ErrorCode::kHeterogeneousDataset: return "HeterogeneousDataset";
    case ErrorCode::kRequiresFeedback: return "RequiresFeedback";
    case ErrorCode::kInvalidHorizon: return "InvalidHorizon";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kMonotonicityViolation: return "MonotonicityViolation";
    case ErrorCode::kInvalidSymbol: return "InvalidSymbol";
    case ErrorCode::kExhaustiveInfeasible: return "ExhaustiveInfeasible";
    case ErrorCode::kNotPSD: return "NotPSD";
    case ErrorCode::kEmptySample: return "EmptySample";
    case ErrorCode::kSupportMismatch: return "SupportMismatch";
    case ErrorCode::kSingletonGroups: return "SingletonGroups";
    case ErrorCode::kInsufficientReplicates: return "InsufficientReplicates";
    case ErrorCode::kCalibrationUnnecessary: return "CalibrationUnnecessary";
    case ErrorCode::kVacuousInf: return "VacuousInf";
    case ErrorCode::kBudgetExceedsPool: return "BudgetExceedsPool";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

Error::Error(ErrorCode code, const std::string& what, Verbatim)
    : std::runtime_error(what), code_(code) {}

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.code(), "[" + stage + "] " + cause.what(), Verbatim{}),
      stage_(std::move(stage)) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace persid
