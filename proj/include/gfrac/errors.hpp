#ifndef GFRAC_ERRORS_HPP
#define GFRAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gfrac {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Construction-time parameter validation (which constraint failed is in the message).
struct ParamOutOfRange : Error {
    using Error::Error;
};

// Numeric evaluation did not converge (Laplace quadrature, symbol evaluation, ...).
struct EvaluationFailure : Error {
    using Error::Error;
};

struct SymbolEvaluationFailure : EvaluationFailure {
    using EvaluationFailure::EvaluationFailure;
};

// CQ contour check: weights changed too much when the contour was refined.
struct AliasingError : Error {
    using Error::Error;
};

// Volterra forward substitution hit a nonpositive pivot.
struct NoConjugate : Error {
    using Error::Error;
};

// Sonine residual above tolerance after a numeric solve.
struct IllConditioned : Error {
    using Error::Error;
};

struct PrimitiveUnavailable : Error {
    using Error::Error;
};

struct HistoryTooLong : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct BadExponent : ParamOutOfRange {
    using ParamOutOfRange::ParamOutOfRange;
};

struct NewtonDiverged : Error {
    using Error::Error;
};

struct SingularJacobian : Error {
    using Error::Error;
};

// weighted fixed point: psi^k(gamma) cannot reach 2*C1 (bounded symbol).
struct NotAttainable : Error {
    using Error::Error;
};

struct ContractionViolated : Error {
    using Error::Error;
};

struct NotSquareIntegrable : Error {
    using Error::Error;
};

struct TailNotNegligible : Error {
    using Error::Error;
};

struct UnsupportedKernel : Error {
    using Error::Error;
};

struct ResolutionInsufficient : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace gfrac

#endif
