#pragma once

#include <stdexcept>
#include <string>

namespace ccmtl {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called with arguments that violate its contract
/// (dimension mismatches, negative weights, bad flags).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// A spec or dataset failed validation (bad generator parameters,
/// non-finite data, undersized tasks).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown: NaN/Inf during iteration, singular systems.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; the message carries the offending line number
/// where one exists.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure (cannot open, cannot write).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace ccmtl
