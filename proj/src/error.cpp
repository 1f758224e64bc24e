#include "bql/error.hpp"

namespace bql {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::DivergentNorm: return "DivergentNorm";
    case ErrorCode::NotToeplitz: return "NotToeplitz";
    case ErrorCode::NonUniformGrid: return "NonUniformGrid";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::WindowTooNarrow: return "WindowTooNarrow";
    case ErrorCode::NotCirculant: return "NotCirculant";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::RankZero: return "RankZero";
    case ErrorCode::MemoryCap: return "MemoryCap";
    case ErrorCode::TruncationInadequate: return "TruncationInadequate";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DegenerateState: return "DegenerateState";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::SingularMeasure: return "SingularMeasure";
    case ErrorCode::Aliased: return "Aliased";
    case ErrorCode::AllZeroPosterior: return "AllZeroPosterior";
    case ErrorCode::KernelDivergent: return "KernelDivergent";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace bql
