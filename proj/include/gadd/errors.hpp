#pragma once

#include <stdexcept>
#include <string>

namespace gadd {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (bad subset, size mismatch, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A configured size cap was exceeded (moment degree, basis degree).
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Floating-point breakdown: non-positive norm, failed Cholesky pivot, solver residual.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IllConditionedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Response variance is (numerically) zero, so normalized indices are undefined.
class DegenerateResponseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// External black-box model broke the line protocol or timed out.
class ModelProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace gadd
