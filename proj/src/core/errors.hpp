#pragma once

#include <stdexcept>
#include <string>

namespace forks {

/// Base of every error raised by the library. The C API maps each subclass
/// onto a distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-domain input data (non-finite values, bad dimensions).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent hyperparameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A maintained quantity lost a numerical property it must keep
/// (positive-definiteness, finiteness).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace forks
