#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cslsim/csl.hpp"
#include "cslsim/dynamics.hpp"
#include "cslsim/pipeline.hpp"

namespace cslsim {

// ---- TOML-style key/value tree --------------------------------------------

struct ConfigValue {
  std::variant<double, std::string, bool, std::vector<double>> value;
  std::string text;  // raw token, kept for exact integer parsing
  int line = 0;
};

using ConfigSection = std::map<std::string, ConfigValue>;

struct ConfigDocument {
  std::map<std::string, ConfigSection> sections;
  std::map<std::string, int> section_lines;
  std::string source;  // file name for diagnostics
};

/// Parses `[section]` headers and `key = value` lines. Values are numbers,
/// "strings", true/false, or flat numeric arrays. `#` starts a comment.
ConfigDocument parse_config(const std::string& text, const std::string& source = "<config>");

// ---- declarative run configuration ----------------------------------------

struct RegimeSpec {
  std::optional<double> gamma;     // 1/s
  std::optional<double> pressure;  // Pa, used when gamma is absent
  std::optional<double> duration;  // s
  std::optional<std::uint64_t> seed;
};

struct ReplaySpec {
  std::optional<double> t_hv, sigma_hv, t_mv, sigma_mv;  // K
  std::optional<double> delta_t, sigma_delta_t;          // K, alternative to the temperatures
};

struct AnalysisSpec {
  double confidence = 0.95;
  std::vector<double> r_c_grid;  // m
  double bandwidth = 0.0;        // Hz, 0 = default
  std::size_t segment_length = 0;
  double overlap = 0.5;
  std::string window = "hann";
  std::size_t mode = 0;          // zero-based
};

struct RunConfig {
  SphereParams sphere{1e-6, 1100.0};
  Environment environment;
  std::vector<OscillatorMode> modes;
  double coupling_beta = 0.0;
  std::optional<double> gamma;  // from [simulation] or derived from pressure
  bool thermal = true;
  double csl_psd = 0.0;
  std::optional<CslParams> csl;  // alternative to csl_psd
  double extra_psd = 0.0;
  double parametric_strength = 0.0;
  double duration = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  int record_stride = 1;
  double burn_in_factor = 5.0;
  std::optional<std::vector<InitialState>> initial_state;
  AnalysisSpec analysis;
  std::optional<RegimeSpec> medium_vacuum;
  std::optional<RegimeSpec> high_vacuum;
  std::optional<ReplaySpec> replay;
  std::filesystem::path output_dir = "cslsim-out";

  /// Damping for the base run: explicit, else from environment pressure.
  double resolved_gamma() const;
  /// Noise per mode at damping `gamma`.
  NoiseConfig noise_at(double gamma) const;
  SimulationConfig simulation() const;
  /// Base simulation with a regime's damping, duration and seed.
  SimulationConfig regime(const RegimeSpec& spec) const;
};

RunConfig run_config_from(const ConfigDocument& doc);
RunConfig load_run_config(const std::filesystem::path& file);

}  // namespace cslsim
