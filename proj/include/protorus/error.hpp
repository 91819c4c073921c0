#pragma once

#include <stdexcept>
#include <string>

namespace protorus {

enum class ErrorCode {
  DivisionByZeroScalar,
  MissingAnchor,
  ParseError,
  OddSubset,
  DimensionMismatch,
  NotFullColumnRank,
  DeterminantNotProper,
  NonPositiveTrace,
  UndecidedSign,
  HorizonExceeded,
  InvalidParameter,
  SingularL,
  NonProperWeights,
  UncertifiedBall,
  NonIsometry,
  TruncationTooSmall,
  NoConvergence,
  ConfigParse
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::DivisionByZeroScalar: return "DivisionByZeroScalar";
    case ErrorCode::MissingAnchor: return "MissingAnchor";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::OddSubset: return "OddSubset";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotFullColumnRank: return "NotFullColumnRank";
    case ErrorCode::DeterminantNotProper: return "DeterminantNotProper";
    case ErrorCode::NonPositiveTrace: return "NonPositiveTrace";
    case ErrorCode::UndecidedSign: return "UndecidedSign";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::SingularL: return "SingularL";
    case ErrorCode::NonProperWeights: return "NonProperWeights";
    case ErrorCode::UncertifiedBall: return "UncertifiedBall";
    case ErrorCode::NonIsometry: return "NonIsometry";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ConfigParse: return "ConfigParse";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace protorus
