#pragma once

#include <stdexcept>
#include <string>

namespace vads {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Dataset violates a structural assumption (duplicate points, zero distance).
class DegenerateDataset : public Error {
public:
    using Error::Error;
};

/// Numeric range exceeded while generating an instance.
class RangeError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents (bad magic, truncated payload, inconsistent header).
class FormatError : public IoError {
public:
    using IoError::IoError;
};

}  // namespace vads
