#pragma once

#include <stdexcept>
#include <string>

namespace fracenv {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument to a numerical routine (precondition violation).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

/// A datum whose declared bounds disagree with its sampled values, or that
/// cannot supply a far-field constant where one is required.
class DatumError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Unwritable output location or a failed write.
class IoError : public Error {
public:
    using Error::Error;
};

/// Iterative solver ran out of iterations.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, int iterations, double residual)
        : Error(what + " (iterations=" + std::to_string(iterations) +
                ", residual=" + std::to_string(residual) + ")"),
          iterations_(iterations),
          residual_(residual) {}

    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

} // namespace fracenv
