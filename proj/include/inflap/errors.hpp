#pragma once

#include <stdexcept>
#include <string>

namespace inflap {

/// Non-finite or malformed arguments (coordinates, shape parameters).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// A point or request lies outside the region where an operation is defined.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Inconsistent run parameters (resolution too coarse, epsilon out of range, ...).
class ConfigurationError : public std::runtime_error {
 public:
  explicit ConfigurationError(const std::string& what) : std::runtime_error(what) {}
};

class UnsupportedError : public std::runtime_error {
 public:
  explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

class InsufficientData : public std::runtime_error {
 public:
  explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

/// Gradient flow requested from a point outside the domain or at a critical point.
class InvalidStart : public std::invalid_argument {
 public:
  explicit InvalidStart(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace inflap
