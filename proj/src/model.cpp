#include "cslsim/model.hpp"

#include <cmath>
#include <string>

#include "cslsim/errors.hpp"

namespace cslsim {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(name) + " must be positive and finite (got " +
                      std::to_string(value) + ")");
  }
}

void require_non_negative(double value, const char* name) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(name) + " must be non-negative and finite (got " +
                      std::to_string(value) + ")");
  }
}

namespace {
double sphere_volume(double radius) { return 4.0 / 3.0 * constants::pi * radius * radius * radius; }
}  // namespace

SphereParams::SphereParams(double radius, double density, double susceptibility)
    : radius_(radius), density_(density), mass_(0.0), susceptibility_(susceptibility) {
  require_positive(radius, "sphere radius");
  require_positive(density, "sphere density");
  mass_ = sphere_volume(radius) * density;
}

SphereParams SphereParams::from_mass(double radius, double mass, double susceptibility) {
  require_positive(radius, "sphere radius");
  require_positive(mass, "sphere mass");
  return SphereParams(radius, mass / sphere_volume(radius), susceptibility);
}

void OscillatorMode::validate() const {
  require_positive(frequency, ("frequency of " + label).c_str());
  if (!std::isfinite(duffing_alpha)) throw DomainError("duffing_alpha of " + label + " is not finite");
}

void Environment::validate() const {
  require_positive(temperature, "environment temperature");
  require_non_negative(pressure, "environment pressure");
  require_positive(gas_molar_mass, "gas molar mass");
}

void NoiseConfig::validate() const {
  require_non_negative(thermal_psd, "thermal_psd");
  require_non_negative(csl_psd, "csl_psd");
  require_non_negative(extra_additive_psd, "extra_additive_psd");
  require_non_negative(parametric_strength, "parametric_strength");
}

double thermal_force_psd(double gamma, double mass, double temperature) {
  require_positive(gamma, "gamma");
  require_positive(mass, "mass");
  if (temperature == 0.0) return 0.0;
  require_positive(temperature, "temperature");
  return 2.0 * gamma * mass * constants::k_B * temperature;
}

double mean_gas_speed(double temperature, double gas_molar_mass) {
  require_positive(temperature, "temperature");
  require_positive(gas_molar_mass, "gas_molar_mass");
  return std::sqrt(8.0 * constants::gas_constant * temperature / (constants::pi * gas_molar_mass));
}

}  // namespace cslsim
