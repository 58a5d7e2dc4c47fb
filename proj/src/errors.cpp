#include "gfbs/errors.hpp"

namespace gfbs {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::ZeroMetric: return "ZeroMetric";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::RangeViolation: return "RangeViolation";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::MNotInvertible: return "MNotInvertible";
    case ErrorCode::MissingOracle: return "MissingOracle";
    case ErrorCode::MissingObjective: return "MissingObjective";
    case ErrorCode::IncompatibleProblem: return "IncompatibleProblem";
    case ErrorCode::MissingParam: return "MissingParam";
    case ErrorCode::DimsTooLarge: return "DimsTooLarge";
    case ErrorCode::OracleNotConverged: return "OracleNotConverged";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Error";
}

}  // namespace gfbs
