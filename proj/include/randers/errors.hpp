#pragma once

#include <stdexcept>
#include <string>

namespace randers {

// Root of every error raised by the library. kind() is a stable machine-readable
// tag used by the command-line driver's error block.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

#define RANDERS_ERROR(Name, Base, Tag)                                  \
    class Name : public Base {                                          \
    public:                                                             \
        using Base::Base;                                               \
        const char* kind() const noexcept override { return Tag; }      \
    }

// Point or curve outside the closed domain.
RANDERS_ERROR(DomainError, Error, "domain");
// A norm, medium or spec that violates its construction invariants.
RANDERS_ERROR(ConstructionError, Error, "construction");
// Input at which the requested quantity is undefined (e.g. y = 0).
RANDERS_ERROR(DegenerateInputError, Error, "degenerate-input");
// Singular or indefinite fundamental tensor.
RANDERS_ERROR(ConvexityError, Error, "convexity");
// Geodesic did not leave the domain within the step budget.
RANDERS_ERROR(TrappedGeodesicError, Error, "trapped-geodesic");
// No geodesic joins the requested boundary pair.
RANDERS_ERROR(ConnectivityError, Error, "connectivity");
// More than one geodesic joins the requested boundary pair.
RANDERS_ERROR(NonAdmissibleError, Error, "non-admissible");
// Shooting failed to reach the miss tolerance.
RANDERS_ERROR(ConvergenceError, Error, "convergence");
// Inputs that violate a documented precondition.
RANDERS_ERROR(PreconditionError, Error, "precondition");
// Path evaluated against a spec other than the one that produced it.
RANDERS_ERROR(TaggingError, Error, "tagging");
// Data violating the hypotheses of a travel-time inversion.
RANDERS_ERROR(InversionError, Error, "inversion");
// Malformed file structure (row counts, indices).
RANDERS_ERROR(StructuralError, Error, "structural");
// A file that cannot be opened, read or written.
RANDERS_ERROR(IoError, Error, "io");

#undef RANDERS_ERROR

// Text that failed to parse. line/column are 1-based; column 0 means "whole line".
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column = 0)
        : Error(format(what, line, column)), line_(line), column_(column) {}

    const char* kind() const noexcept override { return "parse"; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, int line, int column) {
        std::string loc = "line " + std::to_string(line);
        if (column > 0) loc += ", column " + std::to_string(column);
        return loc + ": " + what;
    }

    int line_;
    int column_;
};

// A numeric value annotated with a unit other than the one its key declares.
class UnitError : public ParseError {
public:
    using ParseError::ParseError;
    const char* kind() const noexcept override { return "unit"; }
};

}  // namespace randers
