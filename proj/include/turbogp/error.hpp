#pragma once

#include <stdexcept>
#include <string>

namespace turbogp {

/// Base class of every exception thrown by the core library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad grid size, negative
/// variance, inadmissible parameter, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed, e.g. a Gram matrix that stays indefinite
/// after jitter escalation.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace turbogp
