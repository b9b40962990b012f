#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hopfkit {

// Base for everything the toolkit throws on purpose. Catching this at the
// CLI boundary is what separates "bad input" (exit 3) from a crash.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mismatched jet points/orders, bad operator order, degenerate intervals.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Elementary function evaluated outside its domain (log of a nonpositive
// value, fractional power of a negative base).
class DomainError : public Error {
public:
    using Error::Error;
};

// abs or a fractional power at a point where the derivative requested does
// not exist. A subtype of DomainError so callers may treat them uniformly.
class NonDifferentiableError : public DomainError {
public:
    using DomainError::DomainError;
};

// Jet division by a jet whose value is zero.
class SingularityError : public Error {
public:
    using Error::Error;
};

// Expression source text rejected; position is a 0-based byte offset.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)),
          position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// Expression evaluated with a variable missing from the bindings.
class EvalError : public Error {
public:
    using Error::Error;
};

// A derivative order was requested beyond what an oracle can serve, or a
// point outside the oracle's interval.
class CapabilityError : public Error {
public:
    using Error::Error;
};

// Shooting iteration for a boundary value problem failed to converge.
class ShootingError : public Error {
public:
    using Error::Error;
};

// Reduction of order failed (auxiliary solution blew up immediately).
class ReductionError : public Error {
public:
    using Error::Error;
};

// The top-derivative slot of a nonlinear operator failed the sampled
// strict-positivity requirement at a quadrature node.
class MonotonicityError : public Error {
public:
    using Error::Error;
};

// Problem file failed validation.
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace hopfkit
