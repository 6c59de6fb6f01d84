#pragma once

#include <stdexcept>
#include <string>

namespace pinchnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A linear system (or the I - X loop matrix of a cascade) could not be solved.
class SingularMatrix : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

/// A voltage-ratio denominator vanished.
class DivisionByZero : public Error {
public:
    using Error::Error;
};

/// The rigid PA block does not fit on the waveguide.
class InfeasibleSpacing : public Error {
public:
    using Error::Error;
};

/// All channel coefficients are zero, so no phase/amplitude alignment exists.
class DegenerateChannel : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Bad experiment configuration. Carries the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& reason)
        : Error(field + ": " + reason), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace pinchnet
