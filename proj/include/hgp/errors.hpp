// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace hgp {

/// Malformed network graph (dangling references, isolated locations, ...).
class TopologyError : public std::runtime_error {
 public:
  explicit TopologyError(const std::string& what) : std::runtime_error(what) {}
};

/// Physically well-formed input that falls outside the model's validity
/// range (e.g. pipe residence time longer than one dispatch interval).
class ModelValidityError : public std::runtime_error {
 public:
  explicit ModelValidityError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad user input: unparsable file, unknown unit token, failed validation.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Internal numerical failure (singular factorization, inconsistent system).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hgp
