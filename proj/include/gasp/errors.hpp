#pragma once

#include <stdexcept>
#include <string>

namespace gasp {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller-side contract violation: bad configuration, invalid case parameters,
/// malformed input documents.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input document does not match the boundary-data schema. `path` names the
/// offending field, e.g. "terms[0].values".
class SchemaError : public ValidationError {
 public:
  SchemaError(std::string path, const std::string& what)
      : ValidationError(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Derivative order beyond what the kernel module guarantees.
class UnsupportedOrderError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A numerical procedure stopped before reaching its tolerance. The achieved
/// estimate and its error bound are carried along for diagnostics.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double estimate, double error)
      : std::runtime_error(what), estimate_(estimate), error_(error) {}
  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

/// Result does not fit in a double (e.g. unscaled K_nu for huge arguments).
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

}  // namespace gasp
