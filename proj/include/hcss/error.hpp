#pragma once

#include <stdexcept>
#include <string>

namespace hcss {

enum class ErrorCode {
  InvalidArgument,
  RateInfeasible,
  RankOutOfRange,
  UnknownComposition,
  TargetInfeasible,
  LengthMismatch,
  DivisibilityViolation,
  DegenerateLength,
  FramingError,
  FrameCorrupt,
  ConfigInvalid,
  InsufficientData,
  ParseError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RateInfeasible: return "RateInfeasible";
    case ErrorCode::RankOutOfRange: return "RankOutOfRange";
    case ErrorCode::UnknownComposition: return "UnknownComposition";
    case ErrorCode::TargetInfeasible: return "TargetInfeasible";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DivisibilityViolation: return "DivisibilityViolation";
    case ErrorCode::DegenerateLength: return "DegenerateLength";
    case ErrorCode::FramingError: return "FramingError";
    case ErrorCode::FrameCorrupt: return "FrameCorrupt";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hcss
