#pragma once

#include <stdexcept>
#include <string>

namespace pgnoise {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable file, write failure, truncated stream.
class IoError : public Error {
public:
    using Error::Error;
};

/// The file parsed but its format is not one we accept.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A precondition on the arguments was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace pgnoise
