#pragma once

#include <stdexcept>
#include <string>

namespace aeloc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad band edges, mismatched dimensions, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The cross-correlation carries no signal (all values zero).
class NoSignal : public Error {
public:
    using Error::Error;
};

/// The correlation peak sits on the boundary lag, so the true delay may lie outside the window.
class DelayWindowExceeded : public Error {
public:
    using Error::Error;
};

/// File could not be read, written or parsed.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace aeloc
