#pragma once

#include <string>

#include "cslsim/constants.hpp"

namespace cslsim {

/// Homogeneous sphere. Mass is always derived from radius and density.
class SphereParams {
 public:
  SphereParams(double radius, double density, double susceptibility = 0.0);

  /// Sphere of given radius whose density is chosen to reproduce `mass`.
  static SphereParams from_mass(double radius, double mass, double susceptibility = 0.0);

  double radius() const noexcept { return radius_; }
  double density() const noexcept { return density_; }
  double mass() const noexcept { return mass_; }
  double susceptibility() const noexcept { return susceptibility_; }

  bool operator==(const SphereParams&) const = default;

 private:
  double radius_;
  double density_;
  double mass_;
  double susceptibility_;  // metadata only
};

/// One trap axis. `frequency` is f0 = omega0 / 2pi in Hz.
struct OscillatorMode {
  double frequency = 0.0;
  double duffing_alpha = 0.0;  // kg m^-2 s^-2
  std::string label = "mode1";

  double angular_frequency() const noexcept { return constants::two_pi * frequency; }
  double spring_constant(double mass) const noexcept {
    const double w = angular_frequency();
    return mass * w * w;
  }
  void validate() const;

  bool operator==(const OscillatorMode&) const = default;
};

struct Environment {
  double temperature = 298.0;                       // K
  double pressure = 0.0;                            // Pa
  double gas_molar_mass = constants::molar_mass_air;  // kg/mol

  void validate() const;
  bool operator==(const Environment&) const = default;
};

/// White force-noise budget for one mode. PSDs use the two-sided
/// convention <f(t) f(s)> = S delta(t - s).
struct NoiseConfig {
  double thermal_psd = 0.0;         // N^2/Hz
  double csl_psd = 0.0;             // N^2/Hz
  double extra_additive_psd = 0.0;  // N^2/Hz
  double parametric_strength = 0.0; // s^1/2, <zeta(t) zeta(0)> = strength^2 delta(t)

  double total_additive_psd() const noexcept {
    return thermal_psd + csl_psd + extra_additive_psd;
  }
  bool is_silent() const noexcept {
    return total_additive_psd() == 0.0 && parametric_strength == 0.0;
  }
  void validate() const;
  bool operator==(const NoiseConfig&) const = default;
};

/// S_th = 2 gamma m k_B T. Zero temperature yields zero.
double thermal_force_psd(double gamma, double mass, double temperature);

/// Maxwell-Boltzmann mean speed sqrt(8 R T / (pi M)).
double mean_gas_speed(double temperature, double gas_molar_mass);

/// Label embedded in reports that quote a gas speed.
inline constexpr const char* kMeanSpeedConvention = "maxwell-boltzmann mean speed sqrt(8RT/(pi M))";

inline double hz_to_angular(double f) { return constants::two_pi * f; }
inline double angular_to_hz(double w) { return w / constants::two_pi; }

}  // namespace cslsim
