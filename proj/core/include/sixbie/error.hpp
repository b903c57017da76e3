#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sixbie {

enum class ErrorCode {
  NonDistinctRoots,
  SectorConditionViolated,
  ZeroRoot,
  DomainError,
  ConvergenceFailure,
  SingularPoint,
  MissingNormal,
  BoundViolated,
  IrregularCurve,
  SelfIntersection,
  TooCloseToBoundary,
  CalibrationMismatch,
  SingularJump,
  Divergence,
  MaxIterExceeded,
  NearSingularSystem,
  InvalidArgument,
  ConfigInvalid,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` tells callers which
/// precondition or numerical failure occurred.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonDistinctRoots: return "NonDistinctRoots";
    case ErrorCode::SectorConditionViolated: return "SectorConditionViolated";
    case ErrorCode::ZeroRoot: return "ZeroRoot";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::MissingNormal: return "MissingNormal";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::IrregularCurve: return "IrregularCurve";
    case ErrorCode::SelfIntersection: return "SelfIntersection";
    case ErrorCode::TooCloseToBoundary: return "TooCloseToBoundary";
    case ErrorCode::CalibrationMismatch: return "CalibrationMismatch";
    case ErrorCode::SingularJump: return "SingularJump";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::NearSingularSystem: return "NearSingularSystem";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

}  // namespace sixbie
