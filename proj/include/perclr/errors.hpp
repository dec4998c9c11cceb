#pragma once

#include <stdexcept>
#include <string>

namespace perclr {

/// Caller passed arguments that violate an operation's precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Request exceeds a size guard (box too large, too many enumerated edges...).
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Numerical routine failed to converge; carries the best estimate so far.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double partial, double error_estimate)
        : std::runtime_error(what), partial_(partial), error_estimate_(error_estimate) {}

    double partial() const noexcept { return partial_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double partial_;
    double error_estimate_;
};

/// A pathwise invariant broke (e.g. Harris nestedness). Always a bug, never noise.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace perclr
