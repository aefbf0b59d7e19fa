#pragma once

#include <stdexcept>
#include <string>

namespace varpoint {

/// Argument outside the mathematical domain of an operation (empty input, r < 1, λ <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input too large for an exponential-time oracle.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// The requested accuracy cannot be met at the current grid resolution.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The operation needs something the input does not provide (e.g. a point evaluator).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Simple-function coefficients violate the ‖f‖_∞ = 1 normalisation.
class NormalizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed experiment configuration. what() carries line:column when known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file or directory could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace varpoint
