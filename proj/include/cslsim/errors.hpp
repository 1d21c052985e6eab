#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cslsim {

// Invalid configuration or input contract violation. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A physical parameter outside its admissible domain.
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Numerical failure during integration, quadrature or fitting. CLI exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeError : public NumericError {
 public:
  using NumericError::NumericError;
};

class FitError : public NumericError {
 public:
  using NumericError::NumericError;
};

class QuadratureError : public NumericError {
 public:
  QuadratureError(const std::string& what, double residual)
      : NumericError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class IntegrationError : public NumericError {
 public:
  IntegrationError(const std::string& what, std::uint64_t step)
      : NumericError(what), step_(step) {}
  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

// Throws DomainError naming `name` unless value > 0.
void require_positive(double value, const char* name);
// Throws DomainError naming `name` unless value >= 0.
void require_non_negative(double value, const char* name);

}  // namespace cslsim
