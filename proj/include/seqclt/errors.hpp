#pragma once

#include <stdexcept>
#include <string>

namespace seqclt {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Unresolvable labels, malformed schedules, schema violations.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Iterative or series evaluation that failed to converge.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Requested object would exceed a configured size cap.
class ResourceError : public Error {
public:
    using Error::Error;
};

class SingularCovarianceError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace seqclt
