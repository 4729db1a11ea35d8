#pragma once

#include <stdexcept>
#include <string>

namespace ldr {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix dimensions do not line up (column counts, feature dims, ...).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A matrix carries non-finite entries or a factorization failed on it.
class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

/// An input is structurally empty or out of the admissible range
/// (zero samples, zero classes, zero vector where a direction is needed).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Configuration file or CLI usage problem; maps to process exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ldr
