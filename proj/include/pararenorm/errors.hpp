#pragma once

#include <stdexcept>
#include <string>

namespace pararenorm {

// Failure classes surfaced by library operations.  Codes are part of the
// public contract; the CLI maps any thrown Error to exit status 1 (or 2 for
// UsageError) and prints the code name.
enum class ErrorCode {
  OutOfRange,
  ZeroInput,
  DivisionByZero,
  NonFinite,
  InvalidFraction,
  InvalidPrefix,
  DepthExceedsPrefix,
  RecursionMismatch,
  PreconditionViolated,
  PoleInsideDisk,
  PoleHit,
  SingularInput,
  BranchAmbiguity,
  BranchCutHit,
  OutsideTheta,
  OrbitLeftDomain,
  ArgumentTrackingLost,
  NewtonDivergence,
  NonConvergence,
  IterationCapExceeded,
  ContourEnclosureFailure,
  RootFindingFailure,
  PeriodTooLarge,
  ProjectionInconsistency,
  SampleViolation,
  SeedNotMember,
  ModeMismatch,
  UsageError,
  IoError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ZeroInput: return "ZeroInput";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::InvalidPrefix: return "InvalidPrefix";
    case ErrorCode::DepthExceedsPrefix: return "DepthExceedsPrefix";
    case ErrorCode::RecursionMismatch: return "RecursionMismatch";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::PoleInsideDisk: return "PoleInsideDisk";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::SingularInput: return "SingularInput";
    case ErrorCode::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorCode::BranchCutHit: return "BranchCutHit";
    case ErrorCode::OutsideTheta: return "OutsideTheta";
    case ErrorCode::OrbitLeftDomain: return "OrbitLeftDomain";
    case ErrorCode::ArgumentTrackingLost: return "ArgumentTrackingLost";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::IterationCapExceeded: return "IterationCapExceeded";
    case ErrorCode::ContourEnclosureFailure: return "ContourEnclosureFailure";
    case ErrorCode::RootFindingFailure: return "RootFindingFailure";
    case ErrorCode::PeriodTooLarge: return "PeriodTooLarge";
    case ErrorCode::ProjectionInconsistency: return "ProjectionInconsistency";
    case ErrorCode::SampleViolation: return "SampleViolation";
    case ErrorCode::SeedNotMember: return "SeedNotMember";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace pararenorm
