#pragma once

#include <stdexcept>
#include <string>

namespace csadapt {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input that is well-shaped but numerically unusable (zero column, NaN, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical kernel did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Parameters outside their documented domain.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, parsed or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace csadapt
