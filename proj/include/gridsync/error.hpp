#pragma once

#include <stdexcept>
#include <string>

namespace gridsync {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. The message carries the byte offset or line number.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Arguments that violate an operation's preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Min-max normalization over a constant field.
class DegenerateFieldError : public Error {
public:
    using Error::Error;
};

}  // namespace gridsync
