#pragma once

#include <stdexcept>
#include <string>

namespace geopid {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Structural problems: mismatched dimensions or topologies.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Metric is (numerically) singular where an inverse is required.
class DegenerateMetricError : public Error {
public:
    using Error::Error;
};

// Constraint basis is rank deficient or the Gram matrix B' I B is
// too ill-conditioned to trust.
class DegenerateConstraintError : public Error {
public:
    using Error::Error;
};

// A velocity handed to the constraint machinery does not satisfy the
// constraint within tolerance. Carries the offending residual.
class ConstraintViolationError : public Error {
public:
    ConstraintViolationError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// A state or derived quantity left the representable f64 range.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

// An argument is outside its documented domain (kappa, K, region, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Requested operation is not defined for the declared system.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Config / expression syntax problems. Line is 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0, int column = 0)
        : Error(what), line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Filesystem failures, annotated with the path involved.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace geopid
