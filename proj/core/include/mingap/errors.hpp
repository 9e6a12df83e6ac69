#pragma once

#include <stdexcept>
#include <string>

namespace mingap {

/// Base for all library errors. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its guard range or a config field is invalid.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Input text could not be parsed.
class InputError : public Error {
public:
  using Error::Error;
};

/// Input parsed but breaks a data invariant (e.g. repeated sequence values).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A function precondition on its arguments does not hold.
class ArgumentError : public Error {
public:
  using Error::Error;
};

/// A computation would exceed a size guard (memory or time).
class ResourceError : public Error {
public:
  using Error::Error;
};

} // namespace mingap
