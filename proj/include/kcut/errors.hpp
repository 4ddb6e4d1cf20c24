#pragma once

#include <stdexcept>
#include <string>

namespace kcut {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid or unsupported configuration (size caps, malformed input files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An iterative or quadrature scheme failed to reach its tolerance.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace kcut
