#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace curvlab {

// Root of the library's exception hierarchy. Every error thrown by curvlab
// derives from this so callers can catch library failures in one place.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Target value outside the image of a map on the given bracket.
class RangeError : public Error {
public:
    using Error::Error;
};

// An iterative solver failed to converge.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

// A denominator the formulas rely on vanished (or changed sign).
class DegeneracyError : public Error {
public:
    using Error::Error;
};

// Quadrature could not reach the requested accuracy.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double estimate) : Error(what), estimate_(estimate) {}
    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

// Too few samples to fit.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// More than one root where exactly one was expected.
class AmbiguityError : public Error {
public:
    AmbiguityError(const std::string& what, std::vector<double> roots)
        : Error(what), roots_(std::move(roots)) {}
    const std::vector<double>& roots() const noexcept { return roots_; }

private:
    std::vector<double> roots_;
};

// Time integration broke down. Carries the last state that passed all checks.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double t, std::vector<double> last_state)
        : Error(what), t_(t), last_state_(std::move(last_state)) {}
    double time() const noexcept { return t_; }
    const std::vector<double>& last_state() const noexcept { return last_state_; }

private:
    double t_;
    std::vector<double> last_state_;
};

}  // namespace curvlab
