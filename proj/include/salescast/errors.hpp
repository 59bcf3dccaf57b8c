#pragma once

#include <stdexcept>
#include <string>

namespace salescast {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or structurally invalid input (bad header, bad CSV).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Too many malformed rows to trust the input.
class CorruptInputError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration values.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Data fails an operation's preconditions (empty series, too few rows).
class DataError : public Error {
public:
    using Error::Error;
};

/// Value outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Linear algebra failed beyond ridge repair.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, double condition_estimate = 0.0)
        : Error(what), condition_estimate(condition_estimate) {}
    double condition_estimate;
};

/// Metric cannot be computed (no common days, undefined comparison).
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// A scenario's windows are not covered by the data.
class ScenarioError : public Error {
public:
    using Error::Error;
};

} // namespace salescast
