#include "knzeta/errors.hpp"

namespace knzeta {

const char *error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::MissingAssignment: return "MissingAssignment";
    case ErrorCode::InvalidVariable: return "InvalidVariable";
    case ErrorCode::EmptyIndexSet: return "EmptyIndexSet";
    case ErrorCode::IndexTooSmall: return "IndexTooSmall";
    case ErrorCode::KNotSubset: return "KNotSubset";
    case ErrorCode::WitnessFailed: return "WitnessFailed";
    case ErrorCode::TailNotGeometric: return "TailNotGeometric";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NOutOfRange: return "NOutOfRange";
    case ErrorCode::KinematicsViolation: return "KinematicsViolation";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string &detail)
    : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}

} // namespace knzeta
