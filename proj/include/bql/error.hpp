#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bql {

enum class ErrorCode {
  InvalidArgument,
  Unsupported,
  DivergentNorm,
  NotToeplitz,
  NonUniformGrid,
  NotPositive,
  WindowTooNarrow,
  NotCirculant,
  StepTooLarge,
  RankZero,
  MemoryCap,
  TruncationInadequate,
  GridMismatch,
  DegenerateState,
  NotNormalized,
  SingularMeasure,
  Aliased,
  AllZeroPosterior,
  KernelDivergent,
};

std::string_view to_string(ErrorCode code);

/** Library error carrying a machine-readable code. */
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bql
