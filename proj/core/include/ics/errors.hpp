#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace ics {

// Base class for every failure the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A symmetric matrix was too close to singular (or not positive definite)
// for the requested operation. Carries the eigenvalue evidence so callers
// can report or rank failures.
class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, double smallest, double largest)
        : Error(what), smallest_(smallest), largest_(largest) {}

    double smallest_eigenvalue() const { return smallest_; }
    double largest_eigenvalue() const { return largest_; }
    double condition() const {
        return smallest_ > 0 ? largest_ / smallest_
                             : std::numeric_limits<double>::infinity();
    }

private:
    double smallest_;
    double largest_;
};

// Sample size / dimension mismatches (e.g. n <= p, basis disagreement).
class DimensionError : public Error {
public:
    using Error::Error;
};

// An iterative solver stopped before reaching its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double final_gradient_norm)
        : Error(what), gradient_norm_(final_gradient_norm) {}

    double final_gradient_norm() const { return gradient_norm_; }

private:
    double gradient_norm_;
};

// Caller passed something structurally invalid (bad index, nonpositive
// part, point outside the interval, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// File / parse problems in the CSV, JSON and config front ends.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace ics
