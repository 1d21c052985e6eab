#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "cslsim/model.hpp"

namespace cslsim {

struct InitialState {
  double x = 0.0;  // m
  double p = 0.0;  // kg m/s
  bool operator==(const InitialState&) const = default;
};

/// Everything needed to integrate one run of the 1- or 2-mode oscillator.
struct SimulationConfig {
  SphereParams sphere{1.0e-6, 1100.0};
  std::vector<OscillatorMode> modes;
  double coupling_beta = 0.0;  // kg m^-2 s^-2, cross term beta x_j^2 x_i
  double gamma = 0.0;          // angular damping rate, 1/s, isotropic
  std::vector<NoiseConfig> noise;  // one entry per mode
  double duration = 0.0;       // recorded span, s
  double dt = 0.0;             // integration step; 0 selects the default
  std::uint64_t seed = 0;
  /// Unset: noisy runs start from a draw of the linearized equilibrium.
  std::optional<std::vector<InitialState>> initial_state;
  int record_stride = 1;       // record every n-th step
  double burn_in_factor = 5.0; // noisy runs discard burn_in_factor / gamma first

  void validate() const;
  double max_frequency() const;
  /// dt, or 1/(200 f_max) when dt == 0.
  double step() const;
  double sample_interval() const { return step() * record_stride; }
  std::size_t sample_count() const;
  bool is_noisy() const;
  /// Seconds integrated and discarded before the first recorded sample.
  double burn_in() const;

  nlohmann::ordered_json to_json() const;
  static SimulationConfig from_json(const nlohmann::json& j);
  /// 16 hex digits of FNV-1a over the canonical JSON form.
  std::string digest() const;
};

inline constexpr double kDefaultStepsPerPeriod = 200.0;
inline constexpr double kMinStepsPerPeriod = 50.0;

/// Thermal-only noise for a mode at temperature T.
NoiseConfig thermal_noise(double gamma, double mass, double temperature);

/// Uniformly sampled displacement record, after burn-in.
struct Trajectory {
  double dt = 0.0;  // sample interval, s
  std::vector<std::vector<double>> samples;
  std::uint64_t seed = 0;
  std::string config_digest;
  double burn_in = 0.0;

  std::size_t mode_count() const { return samples.size(); }
  std::size_t length() const { return samples.empty() ? 0 : samples.front().size(); }
  std::span<const double> mode(std::size_t i) const { return samples.at(i); }
};

/// Receives every recorded sample: time since end of burn-in, positions, momenta.
using SampleSink = std::function<void(double t, std::span<const double> x, std::span<const double> p)>;

/// Integrates the run and streams samples to `sink`. Returns the number of
/// samples delivered. Deterministic in (config, seed).
std::size_t simulate_stream(const SimulationConfig& config, const SampleSink& sink);

Trajectory simulate(const SimulationConfig& config);

/// Independent seed for replica `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// FNV-1a 64-bit, hex encoded.
std::string fnv1a_hex(std::string_view data);

}  // namespace cslsim
