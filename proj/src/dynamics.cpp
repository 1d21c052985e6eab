#include "cslsim/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>

#include <boost/random/normal_distribution.hpp>

#include "cslsim/errors.hpp"

namespace cslsim {

void SimulationConfig::validate() const {
  if (modes.empty() || modes.size() > 2) throw ConfigError("simulation needs 1 or 2 modes");
  if (noise.size() != modes.size())
    throw ConfigError("simulation needs one noise entry per mode");
  for (const auto& m : modes) m.validate();
  for (const auto& n : noise) n.validate();
  if (!std::isfinite(coupling_beta)) throw DomainError("coupling_beta is not finite");
  if (modes.size() == 1 && coupling_beta != 0.0)
    throw ConfigError("coupling_beta requires two modes");
  require_positive(gamma, "gamma");
  if (dt < 0.0 || !std::isfinite(dt)) throw ConfigError("dt must be >= 0 (0 selects the default)");
  if (record_stride < 1) throw ConfigError("record_stride must be >= 1");
  require_non_negative(burn_in_factor, "burn_in_factor");
  const double h = step();
  if (h > 1.0 / (kMinStepsPerPeriod * max_frequency()) * (1.0 + 1e-12)) {
    throw ConfigError("dt exceeds the stability guard 1/(50 f_max)");
  }
  if (!(duration >= sample_interval())) throw ConfigError("duration must be at least one sample interval");
  if (initial_state && initial_state->size() != modes.size())
    throw ConfigError("initial_state needs one entry per mode");
  if (initial_state) {
    for (const auto& s : *initial_state) {
      if (!std::isfinite(s.x) || !std::isfinite(s.p)) throw ConfigError("initial_state is not finite");
    }
  }
}

double SimulationConfig::max_frequency() const {
  double f = 0.0;
  for (const auto& m : modes) f = std::max(f, m.frequency);
  return f;
}

double SimulationConfig::step() const {
  if (dt > 0.0) return dt;
  return 1.0 / (kDefaultStepsPerPeriod * max_frequency());
}

std::size_t SimulationConfig::sample_count() const {
  // Guard against floor() landing one short on exact multiples.
  return static_cast<std::size_t>(std::floor(duration / sample_interval() * (1.0 + 1e-12)));
}

bool SimulationConfig::is_noisy() const {
  return std::any_of(noise.begin(), noise.end(), [](const NoiseConfig& n) { return !n.is_silent(); });
}

double SimulationConfig::burn_in() const { return is_noisy() ? burn_in_factor / gamma : 0.0; }

nlohmann::ordered_json SimulationConfig::to_json() const {
  nlohmann::ordered_json j;
  j["sphere"] = {{"radius_m", sphere.radius()},
                 {"density_kg_m3", sphere.density()},
                 {"mass_kg", sphere.mass()},
                 {"susceptibility", sphere.susceptibility()}};
  j["modes"] = nlohmann::ordered_json::array();
  for (const auto& m : modes) {
    j["modes"].push_back({{"label", m.label},
                          {"frequency_hz", m.frequency},
                          {"duffing_alpha_kg_m2_s2", m.duffing_alpha}});
  }
  j["coupling_beta_kg_m2_s2"] = coupling_beta;
  j["gamma_per_s"] = gamma;
  j["noise"] = nlohmann::ordered_json::array();
  for (const auto& n : noise) {
    j["noise"].push_back({{"thermal_psd_n2_hz", n.thermal_psd},
                          {"csl_psd_n2_hz", n.csl_psd},
                          {"extra_additive_psd_n2_hz", n.extra_additive_psd},
                          {"parametric_strength_sqrt_s", n.parametric_strength}});
  }
  j["duration_s"] = duration;
  j["dt_s"] = step();
  j["seed"] = seed;
  if (initial_state) {
    j["initial_state"] = nlohmann::ordered_json::array();
    for (const auto& s : *initial_state) j["initial_state"].push_back({{"x_m", s.x}, {"p_kg_m_s", s.p}});
  } else {
    j["initial_state"] = nullptr;
  }
  j["record_stride"] = record_stride;
  j["burn_in_factor"] = burn_in_factor;
  return j;
}

SimulationConfig SimulationConfig::from_json(const nlohmann::json& j) {
  try {
    SimulationConfig c;
    const auto& s = j.at("sphere");
    c.sphere = SphereParams(s.at("radius_m").get<double>(), s.at("density_kg_m3").get<double>(),
                            s.value("susceptibility", 0.0));
    for (const auto& m : j.at("modes")) {
      c.modes.push_back({m.at("frequency_hz").get<double>(),
                         m.value("duffing_alpha_kg_m2_s2", 0.0),
                         m.value("label", std::string("mode") + std::to_string(c.modes.size() + 1))});
    }
    c.coupling_beta = j.value("coupling_beta_kg_m2_s2", 0.0);
    c.gamma = j.at("gamma_per_s").get<double>();
    for (const auto& n : j.at("noise")) {
      c.noise.push_back({n.value("thermal_psd_n2_hz", 0.0), n.value("csl_psd_n2_hz", 0.0),
                         n.value("extra_additive_psd_n2_hz", 0.0),
                         n.value("parametric_strength_sqrt_s", 0.0)});
    }
    c.duration = j.at("duration_s").get<double>();
    c.dt = j.value("dt_s", 0.0);
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("initial_state") && !j.at("initial_state").is_null()) {
      std::vector<InitialState> init;
      for (const auto& s0 : j.at("initial_state"))
        init.push_back({s0.at("x_m").get<double>(), s0.at("p_kg_m_s").get<double>()});
      c.initial_state = init;
    }
    c.record_stride = j.value("record_stride", 1);
    c.burn_in_factor = j.value("burn_in_factor", 5.0);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("simulation config: ") + e.what());
  }
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string SimulationConfig::digest() const { return fnv1a_hex(to_json().dump()); }

NoiseConfig thermal_noise(double gamma, double mass, double temperature) {
  NoiseConfig n;
  n.thermal_psd = thermal_force_psd(gamma, mass, temperature);
  return n;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

constexpr std::size_t kMaxModes = 2;

// Per-mode coefficients of the splitting step
//   B(h/2) A(h/2) O(h) A(h/2) B(h/2)
// where O applies exact Ornstein-Uhlenbeck friction plus the additive kick
// and the parametric kick -m w^2 zeta x.
struct ModeCoefficients {
  double stiffness;     // m w^2
  double alpha;
  double friction;      // e^{-gamma h}
  double additive_sd;   // sd of the additive momentum kick per step
  double parametric_sd; // sd multiplying m w^2 x per step (strength * sqrt(h))
};

class Integrator {
 public:
  explicit Integrator(const SimulationConfig& c)
      : n_(c.modes.size()), mass_(c.sphere.mass()), beta_(c.coupling_beta), h_(c.step()),
        rng_(c.seed) {
    const double decay = std::exp(-c.gamma * h_);
    // (1 - e^{-2 gamma h}) / (2 gamma), written to stay accurate as gamma h -> 0
    const double ou_variance_time = -std::expm1(-2.0 * c.gamma * h_) / (2.0 * c.gamma);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto& mode = c.modes[i];
      const auto& noise = c.noise[i];
      coef_[i] = {mode.spring_constant(mass_), mode.duffing_alpha, decay,
                  std::sqrt(noise.total_additive_psd() * ou_variance_time),
                  noise.parametric_strength * std::sqrt(h_)};
    }
    if (c.initial_state) {
      for (std::size_t i = 0; i < n_; ++i) {
        x_[i] = (*c.initial_state)[i].x;
        p_[i] = (*c.initial_state)[i].p;
      }
    } else if (c.is_noisy()) {
      // Equilibrium of the linearized mode at the temperature of its additive drive.
      for (std::size_t i = 0; i < n_; ++i) {
        const double t_drive = c.noise[i].total_additive_psd() / (2.0 * c.gamma * mass_ * constants::k_B);
        const double kT = constants::k_B * t_drive;
        x_[i] = std::sqrt(kT / coef_[i].stiffness) * normal_(rng_);
        p_[i] = std::sqrt(kT * mass_) * normal_(rng_);
      }
    }
    update_forces();
  }

  void step() {
    const double half = 0.5 * h_;
    const double drift = half / mass_;
    for (std::size_t i = 0; i < n_; ++i) {
      p_[i] += half * f_[i];
      x_[i] += drift * p_[i];
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const auto& k = coef_[i];
      double p = k.friction * p_[i];
      if (k.additive_sd > 0.0) p += k.additive_sd * normal_(rng_);
      if (k.parametric_sd > 0.0) p -= k.stiffness * x_[i] * k.parametric_sd * normal_(rng_);
      p_[i] = p;
    }
    for (std::size_t i = 0; i < n_; ++i) x_[i] += drift * p_[i];
    update_forces();
    for (std::size_t i = 0; i < n_; ++i) p_[i] += half * f_[i];
    ++steps_;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!std::isfinite(x_[i]) || !std::isfinite(p_[i])) {
        throw IntegrationError("non-finite state in mode " + std::to_string(i + 1) + " at step " +
                                   std::to_string(steps_),
                               steps_);
      }
    }
  }

  std::span<const double> x() const { return {x_.data(), n_}; }
  std::span<const double> p() const { return {p_.data(), n_}; }

 private:
  void update_forces() {
    for (std::size_t i = 0; i < n_; ++i) {
      const double xi = x_[i];
      double f = -coef_[i].stiffness * xi - coef_[i].alpha * xi * xi * xi;
      if (n_ == 2) {
        const double xj = x_[1 - i];
        f -= beta_ * xj * xj * xi;
      }
      f_[i] = f;
    }
  }

  std::size_t n_;
  double mass_;
  double beta_;
  double h_;
  std::array<ModeCoefficients, kMaxModes> coef_{};
  std::array<double, kMaxModes> x_{};
  std::array<double, kMaxModes> p_{};
  std::array<double, kMaxModes> f_{};
  std::uint64_t steps_ = 0;
  std::mt19937_64 rng_;
  // Ziggurat sampler, several times faster than the std polar method.
  boost::random::normal_distribution<double> normal_;
};

}  // namespace

std::size_t simulate_stream(const SimulationConfig& config, const SampleSink& sink) {
  config.validate();
  Integrator integ(config);
  const double h = config.step();
  const auto burn_steps = static_cast<std::uint64_t>(std::ceil(config.burn_in() / h));
  for (std::uint64_t s = 0; s < burn_steps; ++s) integ.step();
  const std::size_t n = config.sample_count();
  const double interval = config.sample_interval();
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) {
      for (int s = 0; s < config.record_stride; ++s) integ.step();
    }
    sink(static_cast<double>(j) * interval, integ.x(), integ.p());
  }
  return n;
}

Trajectory simulate(const SimulationConfig& config) {
  Trajectory traj;
  config.validate();
  traj.dt = config.sample_interval();
  traj.seed = config.seed;
  traj.config_digest = config.digest();
  traj.burn_in = std::ceil(config.burn_in() / config.step()) * config.step();
  const std::size_t n = config.sample_count();
  traj.samples.assign(config.modes.size(), {});
  for (auto& s : traj.samples) s.reserve(n);
  simulate_stream(config, [&](double, std::span<const double> x, std::span<const double>) {
    for (std::size_t i = 0; i < x.size(); ++i) traj.samples[i].push_back(x[i]);
  });
  return traj;
}

}  // namespace cslsim
