#include "cslsim/analysis.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "cslsim/constants.hpp"
#include "cslsim/errors.hpp"

namespace cslsim {

GaussianFit MomentAccumulator::fit(double dt, double gamma) const {
  if (n_ < 100) throw SizeError("a Gaussian fit needs at least 100 samples, got " + std::to_string(n_));
  const double var = variance();
  if (!(var > 0.0)) throw DomainError("degenerate sample: zero variance");
  GaussianFit fit;
  fit.mean = mean_;
  fit.sigma = std::sqrt(var);
  fit.effective_samples = static_cast<double>(n_);
  if (dt > 0.0 && gamma > 0.0)
    fit.effective_samples = std::min(fit.effective_samples, static_cast<double>(n_) * dt * gamma);
  fit.sigma_stderr = fit.sigma / std::sqrt(2.0 * fit.effective_samples);
  return fit;
}

GaussianFit fit_gaussian(std::span<const double> samples, double dt, double gamma) {
  MomentAccumulator acc;
  for (double v : samples) acc.push(v);
  return acc.fit(dt, gamma);
}

TemperatureEstimate effective_temperature(double sigma, const OscillatorMode& mode, double mass) {
  require_positive(sigma, "sigma");
  require_positive(mass, "mass");
  mode.validate();
  TemperatureEstimate est;
  est.t_eff = mode.spring_constant(mass) * sigma * sigma / constants::k_B;
  est.mode_label = mode.label;
  return est;
}

double temperature_uncertainty(double t_eff, double gamma, double t_mea) {
  require_positive(t_eff, "t_eff");
  require_positive(gamma, "gamma");
  require_positive(t_mea, "t_mea");
  return t_eff * std::sqrt(2.0 / (gamma * t_mea));
}

TemperatureEstimate measure_temperature(std::span<const double> x, double dt, const OscillatorMode& mode,
                                        double mass, double gamma) {
  const auto fit = fit_gaussian(x, dt, gamma);
  auto est = effective_temperature(fit.sigma, mode, mass);
  est.t_mea = static_cast<double>(x.size()) * dt;
  est.sigma_1s = temperature_uncertainty(est.t_eff, gamma, est.t_mea);
  return est;
}

Autocorrelation normalized_energy_autocorrelation(std::span<const double> x_squared, double dt, double max_lag) {
  require_positive(dt, "dt");
  require_positive(max_lag, "max_lag");
  const auto lags = static_cast<std::size_t>(std::floor(max_lag / dt));
  if (lags < 1) throw SizeError("max_lag is shorter than one sample");
  if (x_squared.size() < 10 * lags) {
    throw SizeError("energy autocorrelation needs at least 10x max_lag of data (" + std::to_string(x_squared.size()) +
                    " < " + std::to_string(10 * lags) + " samples)");
  }
  Autocorrelation out;
  out.dt = dt;
  out.r = autocorrelation(x_squared, lags);
  const double r0 = out.r.front();
  if (!(r0 > 0.0)) throw DomainError("energy series is identically zero");
  for (double& v : out.r) v /= r0;
  const double mean = std::accumulate(x_squared.begin(), x_squared.end(), 0.0) / static_cast<double>(x_squared.size());
  out.moment_floor = mean * mean / r0;
  return out;
}

namespace {

struct DecayFit {
  double tau = 0.0;
  double c = 0.0;
  double amplitude = 0.0;  // of the decaying shape at the first fitted lag
  double sse = 0.0;
};

// Lags [first, last) of r. With first == 0 the model is anchored at R(0) = 1,
// R = c + (1 - c) g; otherwise R = c + A g with A free. Both are linear in
// the remaining parameters once tau, and with it g, is fixed.
struct Window {
  std::size_t first = 0;
  std::size_t last = 0;
};

// Fills g[k - first] with the decay shape at lag k, normalized to 1 at
// the window start for the exponential and at lag 0 for the kernel model.
using Shape = std::function<void(double tau, Window w, std::vector<double>& g)>;

DecayFit profile(const Autocorrelation& r, Window w, double tau, std::optional<double> floor, const Shape& shape) {
  std::vector<double> g;
  shape(tau, w, g);
  DecayFit f{tau, 0.0, 0.0, 0.0};
  const auto y = [&](std::size_t j) { return r.r[w.first + j]; };
  const std::size_t n = w.last - w.first;
  if (floor) {
    f.c = *floor;
    if (w.first == 0) {
      f.amplitude = 1.0 - f.c;
    } else {
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        num += (y(j) - f.c) * g[j];
        den += g[j] * g[j];
      }
      f.amplitude = num / den;
    }
  } else if (w.first == 0) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      num += (y(j) - g[j]) * (1.0 - g[j]);
      den += (1.0 - g[j]) * (1.0 - g[j]);
    }
    f.c = den > 0.0 ? num / den : 0.0;
    f.amplitude = 1.0 - f.c;
  } else {
    double sn = 0.0, sg = 0.0, sgg = 0.0, sy = 0.0, syg = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sn += 1.0;
      sg += g[j];
      sgg += g[j] * g[j];
      sy += y(j);
      syg += y(j) * g[j];
    }
    const double det = sn * sgg - sg * sg;
    if (det > 0.0) {
      f.amplitude = (sn * syg - sg * sy) / det;
      f.c = (sy - f.amplitude * sg) / sn;
    } else {
      f.c = sy / sn;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double res = y(j) - (f.c + f.amplitude * g[j]);
    f.sse += res * res;
  }
  return f;
}

DecayFit fit_fixed_window(const Autocorrelation& r, Window w, std::optional<double> floor, const Shape& shape) {
  const double lo = std::log(0.05 * r.dt);
  const double hi = std::log(20.0 * std::max(r.lag(w.last - 1) - r.lag(w.first), r.lag(w.last - 1)));
  const auto sse = [&](double log_tau) { return profile(r, w, std::exp(log_tau), floor, shape).sse; };
  // Coarse scan over log tau, then golden-section refinement.
  constexpr int kScan = 240;
  int best = 0;
  double best_sse = INFINITY;
  for (int i = 0; i <= kScan; ++i) {
    const double s = sse(lo + (hi - lo) * i / kScan);
    if (s < best_sse) {
      best_sse = s;
      best = i;
    }
  }
  if (best == kScan) throw FitError("autocorrelation does not decay within the fit window");
  double a = lo + (hi - lo) * std::max(0, best - 1) / kScan;
  double b = lo + (hi - lo) * std::min(kScan, best + 1) / kScan;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = sse(x1), f2 = sse(x2);
  for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = sse(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = sse(x2);
    }
  }
  return profile(r, w, std::exp(0.5 * (a + b)), floor, shape);
}

constexpr std::size_t kMinFitPoints = 5;
constexpr double kWindowFraction = 0.05;

std::optional<double> checked_floor(const Autocorrelation& r, DecayFloor mode) {
  if (mode == DecayFloor::free) return std::nullopt;
  if (!(r.moment_floor > 0.0 && r.moment_floor < 1.0)) throw FitError("moment floor unavailable or outside (0, 1)");
  return r.moment_floor;
}

DampingEstimate fit_decay(const Autocorrelation& r, double fit_window, double fit_start, std::optional<double> floor,
                          const Shape& shape) {
  require_positive(r.dt, "dt");
  require_non_negative(fit_start, "fit_start");
  if (r.r.size() < kMinFitPoints) throw SizeError("autocorrelation too short to fit");
  const double support = r.lag(r.r.size() - 1);
  if (fit_window > support * (1.0 + 1e-12)) throw ConfigError("fit window exceeds the autocorrelation support");

  Window w;
  w.first = static_cast<std::size_t>(std::ceil(fit_start / r.dt * (1.0 - 1e-12)));
  w.last = r.r.size();
  if (w.first + kMinFitPoints > r.r.size()) throw SizeError("fit start leaves fewer than 5 lags");
  const bool automatic = fit_window <= 0.0;
  if (!automatic) w.last = static_cast<std::size_t>(std::floor(fit_window / r.dt * (1.0 + 1e-12))) + 1;
  if (w.last < w.first + kMinFitPoints) throw SizeError("fit window covers fewer than 5 lags");

  // End of the window: first lag where the decaying part falls below 5% of
  // its value at the window start.
  auto crossing = [&](double c, double amplitude) {
    const double level = c + kWindowFraction * amplitude;
    for (std::size_t k = w.first; k < r.r.size(); ++k) {
      if (r.r[k] < level) return std::max(k + 1, w.first + kMinFitPoints);
    }
    return r.r.size();
  };
  if (automatic) {
    // Seed the window from the tail level so long records are not fitted whole.
    const auto tail = std::span(r.r).subspan(r.r.size() / 2);
    const double c0 = floor ? *floor : std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(tail.size());
    const std::size_t seed = crossing(c0, r.r[w.first] - c0);
    w.last = std::min(r.r.size(), w.first + 4 * (seed - w.first));
  }
  DecayFit fit = fit_fixed_window(r, w, floor, shape);
  if (automatic) {
    for (int iter = 0; iter < 30; ++iter) {
      const std::size_t m = crossing(fit.c, fit.amplitude);
      if (m == w.last) break;
      w.last = m;
      fit = fit_fixed_window(r, w, floor, shape);
    }
  }
  if (!(fit.amplitude > 0.0) || !(fit.tau > 0.0) || !std::isfinite(fit.tau)) throw FitError("autocorrelation does not decay");
  DampingEstimate est;
  est.tau = fit.tau;
  est.gamma = 1.0 / fit.tau;
  est.asymptote = fit.c;
  est.fit_start = r.lag(w.first);
  est.fit_window = r.lag(w.last - 1);
  est.fit_residual = std::sqrt(fit.sse / static_cast<double>(w.last - w.first)) / fit.amplitude;
  return est;
}

}  // namespace

DampingEstimate fit_exponential_decay(const Autocorrelation& r, double fit_window, double fit_start, DecayFloor floor) {
  const Shape exponential = [&r](double tau, Window w, std::vector<double>& g) {
    g.resize(w.last - w.first);
    const double t0 = r.lag(w.first);
    for (std::size_t k = w.first; k < w.last; ++k) g[k - w.first] = std::exp(-(r.lag(k) - t0) / tau);
  };
  return fit_decay(r, fit_window, fit_start, checked_floor(r, floor), exponential);
}

DampingEstimate fit_envelope_decay(const Autocorrelation& r, const LowPassKernel& kernel, double fit_window,
                                   DecayFloor floor) {
  require_positive(kernel.dt, "kernel dt");
  if (kernel.weights.empty()) throw ConfigError("empty low-pass kernel");
  // Self-correlation of the kernel on the input grid, offsets 0..n-1 (even).
  const std::size_t n = kernel.weights.size();
  std::vector<double> self(n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t u = 0; u + s < n; ++u) self[s] += kernel.weights[u] * kernel.weights[u + s];
  const double span = static_cast<double>(n - 1) * kernel.dt;

  // C(t) = sum_s self(s) exp(-|t - s dt| / (2 tau)); beyond the kernel span
  // it factorizes into exp(-t / (2 tau)) times a constant.
  const Shape shape = [&](double tau, Window w, std::vector<double>& g) {
    const double rate = 0.5 / tau;
    auto c_at = [&](double t) {
      double sum = self[0] * std::exp(-rate * t);
      for (std::size_t s = 1; s < n; ++s) {
        const double d = static_cast<double>(s) * kernel.dt;
        sum += self[s] * (std::exp(-rate * std::abs(t - d)) + std::exp(-rate * (t + d)));
      }
      return sum;
    };
    const double c0 = c_at(0.0);
    double far = 0.0;  // C(t) exp(rate t) for t >= span
    bool have_far = false;
    g.resize(w.last - w.first);
    for (std::size_t k = w.first; k < w.last; ++k) {
      const double t = r.lag(k);
      double c;
      if (t >= span) {
        if (!have_far) {
          far = c_at(t) * std::exp(rate * t);
          have_far = true;
        }
        c = far * std::exp(-rate * t);
      } else {
        c = c_at(t);
      }
      const double ratio = c / c0;
      g[k - w.first] = ratio * ratio;
    }
  };
  // Energy decays at gamma while C decays at gamma / 2, so tau here is 1/gamma.
  return fit_decay(r, fit_window, 0.0, checked_floor(r, floor), shape);
}

DampingEstimate measure_damping(std::span<const double> x, double dt, double center_frequency, double bandwidth) {
  const auto env = envelope_squared(x, dt, center_frequency, bandwidth);
  const double record = static_cast<double>(env.x2.size()) * env.dt;
  const auto r = normalized_energy_autocorrelation(env, record / 10.0);
  return fit_envelope_decay(r, env.kernel);
}

double damping_from_pressure(double pressure, double mean_speed, double radius, double density) {
  require_positive(pressure, "pressure");
  require_positive(mean_speed, "mean_speed");
  require_positive(radius, "radius");
  require_positive(density, "density");
  return 16.0 / constants::pi * pressure / (mean_speed * radius * density);
}

double radius_from_damping(double gamma, double pressure, double mean_speed, double density) {
  require_positive(gamma, "gamma");
  require_positive(pressure, "pressure");
  require_positive(mean_speed, "mean_speed");
  require_positive(density, "density");
  return 16.0 / constants::pi * pressure / (mean_speed * gamma * density);
}

double radius_from_equipartition(double sigma, double frequency, double density, double temperature) {
  require_positive(sigma, "sigma");
  require_positive(frequency, "frequency");
  require_positive(density, "density");
  require_positive(temperature, "temperature");
  const double w = hz_to_angular(frequency);
  return std::cbrt(3.0 * constants::k_B * temperature / (4.0 * constants::pi * sigma * sigma * density * w * w));
}

double two_sided_z(double confidence) {
  if (!(confidence > 0.5 && confidence < 1.0)) throw DomainError("confidence must lie in (0.5, 1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * confidence);
}

ExcessTemperature excess_temperature_bound(const TemperatureEstimate& hv, const TemperatureEstimate& mv,
                                           double confidence) {
  if (!hv.sigma_1s || !mv.sigma_1s) throw ConfigError("both temperature estimates need an uncertainty");
  require_non_negative(*hv.sigma_1s, "sigma_hv");
  require_non_negative(*mv.sigma_1s, "sigma_mv");
  ExcessTemperature out;
  out.confidence = confidence;
  out.z = two_sided_z(confidence);
  out.delta_t = hv.t_eff - mv.t_eff;
  out.sigma_delta_t = std::max(out.delta_t, 0.0) + out.z * std::hypot(*hv.sigma_1s, *mv.sigma_1s);
  return out;
}

ExcessPsd excess_force_psd(double delta_t, double mass, double gamma) {
  require_positive(mass, "mass");
  require_positive(gamma, "gamma");
  if (!std::isfinite(delta_t)) throw DomainError("delta_t is not finite");
  if (delta_t < 0.0) return {0.0, true};
  return {2.0 * gamma * mass * constants::k_B * delta_t, false};
}

}  // namespace cslsim
