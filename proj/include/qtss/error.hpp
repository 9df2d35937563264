#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qtss {

enum class ErrorCode {
  LengthMismatch,
  NotNormalized,
  NonFiniteAmplitude,
  TargetOutOfRange,
  DimensionMismatch,
  NotOrthonormal,
  NotUnitary,
  TargetsOverlap,
  ZeroProbabilityBranchSampled,
  EmptyKeepSet,
  LabelOutOfRange,
  SizeOutOfRange,
  ConfigInvalid,
  EmptyInput,
  SelfCapture,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NonFiniteAmplitude: return "NonFiniteAmplitude";
    case ErrorCode::TargetOutOfRange: return "TargetOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::TargetsOverlap: return "TargetsOverlap";
    case ErrorCode::ZeroProbabilityBranchSampled: return "ZeroProbabilityBranchSampled";
    case ErrorCode::EmptyKeepSet: return "EmptyKeepSet";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::SizeOutOfRange: return "SizeOutOfRange";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SelfCapture: return "SelfCapture";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qtss
