#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace persid {

enum class ErrorCode {
  kInvalidArgument,
  kConfigError,
  kDimensionMismatch,
  kOutOfBounds,
  kSplitInfeasible,
  kSplitViolation,
  kHeterogeneousDataset,
  kRequiresFeedback,
  kInvalidHorizon,
  kNumericalFailure,
  kEmptyDataset,
  kMonotonicityViolation,
  kInvalidSymbol,
  kExhaustiveInfeasible,
  kNotPSD,
  kEmptySample,
  kSupportMismatch,
  kSingletonGroups,
  kInsufficientReplicates,
  kCalibrationUnnecessary,
  kVacuousInf,
  kBudgetExceedsPool,
};

std::string_view error_code_name(ErrorCode code);

/// Base exception for every failure raised by the library. The code is the
/// machine-readable category; what() carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 protected:
  struct Verbatim {};
  Error(ErrorCode code, const std::string& what, Verbatim);

 private:
  ErrorCode code_;
};

/// An Error raised while a pipeline stage was running. what() is prefixed
/// with "[stage]" so diagnostics identify where the pipeline stopped.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause);

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace persid
