#pragma once

#include <stdexcept>
#include <string>

namespace gfbs {

enum class ErrorCode {
  NotSymmetric,
  NotPSD,
  ZeroMetric,
  DimensionMismatch,
  NonSquare,
  RangeViolation,
  UnsupportedKind,
  SolverFailure,
  MNotInvertible,
  MissingOracle,
  MissingObjective,
  IncompatibleProblem,
  MissingParam,
  DimsTooLarge,
  OracleNotConverged,
  ConfigError,
};

const char* error_code_name(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace gfbs
