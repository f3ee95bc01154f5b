#pragma once

#include <stdexcept>
#include <string>

namespace nlcm {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A caller broke an interface contract (dimension mismatch, bad argument).
struct ContractViolation : Error {
    using Error::Error;
};

/// A model was evaluated at a configuration where it is undefined
/// (origin of an inverse-square potential, coinciding particles, ...).
struct SingularConfiguration : Error {
    using Error::Error;
};

/// An evaluation produced a non-finite value; carries the time at which
/// it happened so blow-up handling can report it.
struct NonFiniteError : Error {
    double t;
    NonFiniteError(const std::string& msg, double t_) : Error(msg), t(t_) {}
};

/// A mathematical precondition of an operation does not hold.
struct PreconditionError : Error {
    using Error::Error;
};

/// Scenario configuration could not be parsed or validated.
struct ParseError : Error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int column_ = 1)
        : Error(msg), line(line_), column(column_) {}
};

}  // namespace nlcm
