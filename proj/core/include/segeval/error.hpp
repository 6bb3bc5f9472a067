#pragma once

#include <stdexcept>
#include <string>

namespace segeval {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid data: malformed files, out-of-range labels, misaligned arrays.
class InputError : public Error {
public:
    using Error::Error;
};

/// Incompatible configurations (merging stats built under different
/// configs, comparing reports with different fingerprints).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Filesystem failures: unreadable or unwritable paths.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace segeval
