#pragma once

#include <stdexcept>
#include <string>

namespace aqite {

/// Root of the library's exception hierarchy. `kind()` is a stable
/// machine-readable tag used in CLI error JSON.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Operands disagree on qubit count or state dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dimension_error"; }
};

class ModelError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "model_error"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config_error"; }
};

/// Non-finite coefficients or a Hermiticity residual beyond the hard limit.
class IntegrationDiverged : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "integration_diverged"; }
};

/// Term-count ceiling or dense-size cap exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "resource_error"; }
};

/// A documented precondition was violated by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "contract_violation"; }
};

class NumericError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numeric_error"; }
};

/// Input records or files lack required columns/fields.
class SchemaError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "schema_error"; }
};

}  // namespace aqite
