#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace delaywave {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment or solver parameters. `field()` names the offending setting.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Operation applied to an object in the wrong state (e.g. extending a trace twice).
class StateError : public Error {
public:
    using Error::Error;
};

/// Query outside the covered time or space range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Parameter outside the mathematical domain of a formula.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Input that cannot be analyzed (too few samples, non-positive errors, ...).
class AnalysisError : public Error {
public:
    using Error::Error;
};

}  // namespace delaywave
