#include "cslsim/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "cslsim/constants.hpp"
#include "cslsim/errors.hpp"
#include "cslsim/parallel.hpp"

namespace cslsim {

double BoundReport::lambda_at(double r_c) const {
  if (!curve) throw DomainError("report has no exclusion curve");
  for (const auto& p : curve->points) {
    if (std::abs(p.r_c - r_c) <= 1e-12 * r_c) return p.lambda_upper;
  }
  throw ConfigError("r_c not on the report grid");
}

BoundReport bound_from_excess(double delta_t, double sigma_delta_t, const SphereParams& sphere, double gamma,
                              const std::vector<double>& r_c_grid, double confidence) {
  require_positive(gamma, "gamma");
  require_non_negative(sigma_delta_t, "sigma_delta_t");
  BoundReport rep;
  rep.kind = "excess";
  rep.delta_t = delta_t;
  rep.sigma_delta_t = sigma_delta_t;
  rep.confidence = confidence;
  rep.z = two_sided_z(confidence);
  rep.convention = kExcessBoundConvention;
  rep.sphere = sphere;
  rep.gamma = gamma;
  const auto central = excess_force_psd(delta_t, sphere.mass(), gamma);
  rep.excess_psd = central.psd;
  if (central.clamped) rep.flags.push_back(kFlagNegativeExcess);
  rep.excess_psd_bound = excess_force_psd(sigma_delta_t, sphere.mass(), gamma).psd;
  if (rep.excess_psd_bound > 0.0 && !r_c_grid.empty()) {
    rep.curve = exclusion_curve(rep.excess_psd_bound, sphere, r_c_grid, confidence);
  }
  nlohmann::ordered_json in{{"delta_t", delta_t},
                            {"sigma_delta_t", sigma_delta_t},
                            {"radius_m", sphere.radius()},
                            {"density", sphere.density()},
                            {"gamma", gamma},
                            {"grid", r_c_grid},
                            {"confidence", confidence}};
  rep.inputs_digest = fnv1a_hex(in.dump());
  return rep;
}

BoundReport replay(const ReplayInputs& in) {
  const auto ex = excess_temperature_bound(in.hv, in.mv, in.confidence);
  auto rep = bound_from_excess(ex.delta_t, ex.sigma_delta_t, in.sphere, in.gamma, in.r_c_grid, in.confidence);
  rep.kind = "replay";
  rep.hv = in.hv;
  rep.mv = in.mv;
  if (ex.delta_t - ex.z * std::hypot(*in.hv.sigma_1s, *in.mv.sigma_1s) > 0.0)
    rep.flags.push_back(kFlagHeatingDetected);
  nlohmann::ordered_json j{{"hv", {in.hv.t_eff, *in.hv.sigma_1s}},
                           {"mv", {in.mv.t_eff, *in.mv.sigma_1s}},
                           {"radius_m", in.sphere.radius()},
                           {"density", in.sphere.density()},
                           {"gamma", in.gamma},
                           {"grid", in.r_c_grid},
                           {"confidence", in.confidence}};
  rep.inputs_digest = fnv1a_hex(j.dump());
  return rep;
}

ReplayInputs table_one_inputs() {
  ReplayInputs in;
  in.sphere = SphereParams::from_mass(1.0e-6, 4.7e-15);
  in.gamma = hz_to_angular(34e-6);
  in.hv = TemperatureEstimate{297.9, 16.2, 9.5e5, "mode1"};
  in.mv = TemperatureEstimate{291.4, 4.1, 0.0, "mode1"};
  return in;
}

namespace {

double lockin_bandwidth(const VirtualExperimentOptions& opts, const OscillatorMode& mode) {
  return opts.bandwidth > 0.0 ? opts.bandwidth : default_envelope_bandwidth(mode.frequency);
}

}  // namespace

RegimeMeasurement measure_regime(const SimulationConfig& config, const std::string& name,
                                 const VirtualExperimentOptions& opts) {
  config.validate();
  if (opts.mode >= config.modes.size()) throw ConfigError("analysis mode index out of range");
  const auto& mode = config.modes[opts.mode];
  const double dt = config.sample_interval();
  std::vector<MomentAccumulator> moments(config.modes.size());
  EnvelopeDetector detector(dt, mode.frequency, lockin_bandwidth(opts, mode), config.gamma);
  std::vector<double> x2;
  x2.reserve(static_cast<std::size_t>(config.duration / detector.output_interval()) + 1);
  const std::size_t which = opts.mode;
  simulate_stream(config, [&](double, std::span<const double> x, std::span<const double>) {
    for (std::size_t i = 0; i < x.size(); ++i) moments[i].push(x[i]);
    if (auto s = detector.push(x[which])) x2.push_back(s->x2());
  });

  RegimeMeasurement m;
  m.name = name;
  m.gamma_input = config.gamma;
  m.duration = static_cast<double>(moments.front().count()) * dt;
  m.seed = config.seed;
  m.config_digest = config.digest();
  double gamma = config.gamma;
  if (opts.measure_gamma) {
    if (x2.empty()) throw SizeError("run shorter than the lock-in settling time");
    const double out_dt = detector.output_interval();
    const auto r = normalized_energy_autocorrelation(x2, out_dt, static_cast<double>(x2.size()) * out_dt / 10.0);
    m.damping = fit_envelope_decay(r, detector.kernel());
    gamma = m.damping->gamma;
  }
  const double mass = config.sphere.mass();
  for (std::size_t i = 0; i < config.modes.size(); ++i) {
    const auto fit = moments[i].fit(dt, gamma);
    auto t = effective_temperature(fit.sigma, config.modes[i], mass);
    t.t_mea = m.duration;
    t.sigma_1s = temperature_uncertainty(t.t_eff, gamma, t.t_mea);
    m.temperatures.push_back(t);
  }
  return m;
}

BoundReport run_virtual_experiment(const SimulationConfig& mv, const SimulationConfig& hv,
                                   const std::vector<double>& r_c_grid, double confidence,
                                   const VirtualExperimentOptions& opts) {
  mv.validate();
  hv.validate();
  if (!(mv.sphere == hv.sphere)) throw ConfigError("medium and high vacuum runs must share the sphere");
  if (mv.modes != hv.modes) throw ConfigError("medium and high vacuum runs must share the modes");
  if (!(mv.gamma >= 100.0 * hv.gamma))
    throw ConfigError("medium vacuum damping must be at least 100x the high vacuum damping");

  const std::vector<std::pair<const SimulationConfig*, std::string>> jobs{{&mv, "medium-vacuum"},
                                                                         {&hv, "high-vacuum"}};
  auto regimes = parallel_map(
      jobs.size(), [&](std::size_t i) { return measure_regime(*jobs[i].first, jobs[i].second, opts); }, opts.threads);

  const auto& tm = regimes[0].temperatures[opts.mode];
  const auto& th = regimes[1].temperatures[opts.mode];
  const double gamma_hv = regimes[1].damping ? regimes[1].damping->gamma : hv.gamma;
  const auto ex = excess_temperature_bound(th, tm, confidence);
  auto rep = bound_from_excess(ex.delta_t, ex.sigma_delta_t, hv.sphere, gamma_hv, r_c_grid, confidence);
  rep.kind = "virtual-experiment";
  rep.hv = th;
  rep.mv = tm;
  if (ex.delta_t - ex.z * std::hypot(*th.sigma_1s, *tm.sigma_1s) > 0.0) rep.flags.push_back(kFlagHeatingDetected);

  // Radius cross-checks from the medium vacuum record.
  const auto& mode = mv.modes[opts.mode];
  const double sigma_mv = std::sqrt(tm.t_eff * constants::k_B / mode.spring_constant(mv.sphere.mass()));
  rep.radius_from_equipartition =
      radius_from_equipartition(sigma_mv, mode.frequency, mv.sphere.density(), opts.environment_temperature);
  if (opts.mv_pressure && regimes[0].damping) {
    rep.radius_from_damping =
        radius_from_damping(regimes[0].damping->gamma, *opts.mv_pressure,
                            mean_gas_speed(opts.environment_temperature, opts.gas_molar_mass), mv.sphere.density());
  }
  nlohmann::ordered_json j{{"mv", mv.to_json()}, {"hv", hv.to_json()}, {"grid", r_c_grid}, {"confidence", confidence}};
  rep.inputs_digest = fnv1a_hex(j.dump());
  rep.regimes = std::move(regimes);
  return rep;
}

SimulationConfig table_two_config(double gamma_over_2pi, bool nonlinear, double duration, std::uint64_t seed,
                                  double temperature) {
  SimulationConfig c;
  c.sphere = SphereParams::from_mass(1.0e-6, 4.7e-15);
  const double s = nonlinear ? kTableTwoNonlinearScale : 0.0;
  c.modes = {OscillatorMode{kModeOneFrequency, s * kTableTwoAlpha1, "mode1"},
             OscillatorMode{kModeTwoFrequency, s * kTableTwoAlpha2, "mode2"}};
  c.coupling_beta = s * kTableTwoBeta;
  c.gamma = hz_to_angular(gamma_over_2pi);
  const auto n = thermal_noise(c.gamma, c.sphere.mass(), temperature);
  c.noise = {n, n};
  c.duration = duration;
  c.seed = seed;
  c.record_stride = 8;
  return c;
}

namespace {

constexpr double kPresetMvHz = 0.4;
constexpr double kPresetHvHz = 0.004;

SimulationConfig single_mode(double gamma_over_2pi, double duration, std::uint64_t seed, double csl_temperature) {
  SimulationConfig c;
  c.sphere = SphereParams::from_mass(1.0e-6, 4.7e-15);
  c.modes = {OscillatorMode{kModeOneFrequency, 0.0, "mode1"}};
  c.gamma = hz_to_angular(gamma_over_2pi);
  auto n = thermal_noise(c.gamma, c.sphere.mass(), kRoomTemperature);
  n.csl_psd = csl_temperature > 0.0 ? thermal_force_psd(c.gamma, c.sphere.mass(), csl_temperature) : 0.0;
  c.noise = {n};
  c.duration = duration;
  c.seed = seed;
  c.record_stride = 8;
  return c;
}

}  // namespace

VirtualExperimentPreset virtual_experiment_preset(std::uint64_t seed, double csl_temperature, double gamma_t) {
  require_positive(gamma_t, "gamma_t");
  require_non_negative(csl_temperature, "csl_temperature");
  VirtualExperimentPreset p;
  p.mv = single_mode(kPresetMvHz, gamma_t / hz_to_angular(kPresetMvHz), derive_seed(seed, 0), 0.0);
  p.hv = single_mode(kPresetHvHz, gamma_t / hz_to_angular(kPresetHvHz), derive_seed(seed, 1), csl_temperature);
  const double rel = std::sqrt(2.0 / gamma_t);
  p.expected_sigma_combined = std::hypot(rel * (kRoomTemperature + csl_temperature), rel * kRoomTemperature);
  return p;
}

double detectable_csl_temperature(double n_sigma, double gamma_t) {
  require_positive(n_sigma, "n_sigma");
  require_positive(gamma_t, "gamma_t");
  const double rel = std::sqrt(2.0 / gamma_t);
  double t = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double next = n_sigma * std::hypot(rel * (kRoomTemperature + t), rel * kRoomTemperature);
    if (std::abs(next - t) < 1e-12 * next) return next;
    t = next;
  }
  throw NumericError("no detectable CSL temperature at this significance; the fixed point diverges");
}

}  // namespace cslsim
