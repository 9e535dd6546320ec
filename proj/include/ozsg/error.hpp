#pragma once

#include <stdexcept>
#include <string>

namespace ozsg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A learner run exceeded its wall-clock budget.
class TimeLimitExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace ozsg
