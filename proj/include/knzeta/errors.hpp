#ifndef KNZETA_ERRORS_HPP
#define KNZETA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace knzeta {

// Stable error identifiers. The CLI prints the identifier name verbatim.
enum class ErrorCode {
    PoleProximity,
    MissingAssignment,
    InvalidVariable,
    EmptyIndexSet,
    IndexTooSmall,
    KNotSubset,
    WitnessFailed,
    TailNotGeometric,
    BudgetExceeded,
    NOutOfRange,
    KinematicsViolation,
    ParseError,
};

const char *error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &detail);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace knzeta

#endif
