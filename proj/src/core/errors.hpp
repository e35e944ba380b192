#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace erdiff {

/// Bad or missing configuration (parameters, schedules, CFL, files).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::string path = {})
      : std::runtime_error(what), path_(std::move(path)) {}
  /// JSON-pointer-like location of the offending key, empty when unknown.
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical failure while time stepping.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::size_t step, std::size_t index)
      : std::runtime_error(what), step_(step), index_(index) {}
  std::size_t step() const noexcept { return step_; }
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t step_;
  std::size_t index_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace erdiff
