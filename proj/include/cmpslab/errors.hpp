#pragma once

#include <stdexcept>
#include <string>

namespace cmpslab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix or tensor shapes that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Caller-supplied value outside the operation's domain.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed JSON or CSV input; the message names the offending field.
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

/// A size guard was exceeded (path count, quadrature budget, state size).
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Valid input outside the supported scope (e.g. D > 1 path quadrature).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// The requested quantity does not exist for this input (e.g. zero norm).
class UndefinedValueError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmpslab
