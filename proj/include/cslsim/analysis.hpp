#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cslsim/demod.hpp"
#include "cslsim/model.hpp"
#include "cslsim/spectral.hpp"

namespace cslsim {

struct GaussianFit {
  double mean = 0.0;          // m
  double sigma = 0.0;         // m, maximum likelihood
  double sigma_stderr = 0.0;  // m
  double effective_samples = 0.0;
};

/// Streaming mean/variance (Welford), for records too long to keep.
class MomentAccumulator {
 public:
  void push(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return n_ ? m2_ / static_cast<double>(n_) : 0.0; }
  /// Same contract as fit_gaussian.
  GaussianFit fit(double dt = 0.0, double gamma = 0.0) const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// ML Gaussian fit. With dt and gamma given, the standard error of sigma uses
/// N_eff = N dt gamma independent samples (capped at N), the count implied by
/// the energy correlation time of an oscillator; otherwise N_eff = N.
GaussianFit fit_gaussian(std::span<const double> samples, double dt = 0.0, double gamma = 0.0);

struct TemperatureEstimate {
  double t_eff = 0.0;                // K
  std::optional<double> sigma_1s;    // K
  double t_mea = 0.0;                // s
  std::string mode_label;
};

/// T_eff = m w0^2 sigma^2 / k_B.
TemperatureEstimate effective_temperature(double sigma, const OscillatorMode& mode, double mass);

/// sigma_T = T_eff sqrt(2 / (gamma t_mea)).
double temperature_uncertainty(double t_eff, double gamma, double t_mea);

/// Effective temperature of one displacement series with its uncertainty
/// from the square-root law.
TemperatureEstimate measure_temperature(std::span<const double> x, double dt, const OscillatorMode& mode,
                                        double mass, double gamma);

/// Normalized raw energy autocorrelation R(t) = <X2(t) X2(0)> / <X2^2>.
struct Autocorrelation {
  double dt = 0.0;
  std::vector<double> r;
  /// <X2>^2 / <X2^2>, the value R tends to at lags much longer than the
  /// correlation time.
  double moment_floor = 0.0;

  double lag(std::size_t k) const { return static_cast<double>(k) * dt; }
};

Autocorrelation normalized_energy_autocorrelation(std::span<const double> x_squared, double dt, double max_lag);
inline Autocorrelation normalized_energy_autocorrelation(const EnvelopeSeries& env, double max_lag) {
  return normalized_energy_autocorrelation(env.x2, env.dt, max_lag);
}

struct DampingEstimate {
  double gamma = 0.0;         // 1/s
  double tau = 0.0;           // s
  double fit_residual = 0.0;  // rms residual relative to the decaying amplitude 1 - c
  double fit_window = 0.0;    // s, last fitted lag
  double fit_start = 0.0;     // s, first fitted lag
  double asymptote = 0.0;     // c
};

enum class DecayFloor {
  free,    // c is a least-squares parameter
  moment,  // c is fixed to Autocorrelation::moment_floor
};

/// Least-squares fit of R(t) = c + (1 - c) exp(-t/tau) over [0, fit_window].
/// fit_window <= 0 selects it automatically: the first lag where R falls
/// below c + 0.05 (1 - c), iterated to a fixed point.
///
/// With fit_start > 0 the fit covers [fit_start, fit_window] and the model is
/// c + A exp(-(t - fit_start)/tau) with A free; use this to skip lags shaped
/// by a smoothing filter (EnvelopeSeries::memory).
DampingEstimate fit_exponential_decay(const Autocorrelation& r, double fit_window = 0.0, double fit_start = 0.0,
                                      DecayFloor floor = DecayFloor::free);

/// Decay fit for an envelope taken through the finite kernel h. For a mode
/// in thermal equilibrium demodulated at its frequency the complex envelope
/// has covariance C(t) = sum_s g_s exp(-gamma |t - s dt| / 2), g the
/// self-correlation of h, and R(t) = c + (1 - c) (C(t)/C(0))^2. Fitting
/// from lag 0 keeps the part of R inside the kernel memory, which holds
/// most of the decay when gamma is comparable to the lock-in bandwidth.
DampingEstimate fit_envelope_decay(const Autocorrelation& r, const LowPassKernel& kernel, double fit_window = 0.0,
                                   DecayFloor floor = DecayFloor::moment);

/// Envelope, autocorrelation and kernel-aware decay fit in one pass. The
/// autocorrelation extends to a tenth of the envelope record.
DampingEstimate measure_damping(std::span<const double> x, double dt, double center_frequency, double bandwidth);

/// Kinetic damping of a sphere in dilute gas, gamma = (16/pi) P / (nu R rho).
double damping_from_pressure(double pressure, double mean_speed, double radius, double density);
/// Its inverse, R = (16/pi) P / (nu gamma rho).
double radius_from_damping(double gamma, double pressure, double mean_speed, double density);
/// R = [3 k_B T / (4 pi sigma^2 rho w0^2)]^(1/3).
double radius_from_equipartition(double sigma, double frequency, double density, double temperature);

/// Convention for combining the two temperature estimates into a bound.
inline constexpr const char* kExcessBoundConvention =
    "sigma_delta_t = max(delta_t, 0) + z * sqrt(sigma_hv^2 + sigma_mv^2); inputs are one-standard-deviation "
    "values; z is the two-sided Gaussian quantile; delta_t clamped at the physical boundary delta_t >= 0";

struct ExcessTemperature {
  double delta_t = 0.0;        // K
  double sigma_delta_t = 0.0;  // K, the bound at the stated confidence
  double z = 0.0;
  double confidence = 0.0;
};

/// Two-sided Gaussian quantile for a central confidence interval, z(0.95) = 1.96.
double two_sided_z(double confidence);

ExcessTemperature excess_temperature_bound(const TemperatureEstimate& hv, const TemperatureEstimate& mv,
                                           double confidence);

struct ExcessPsd {
  double psd = 0.0;       // N^2/Hz
  bool clamped = false;   // negative delta_t mapped to zero
};

/// delta_S = 2 gamma m k_B delta_t, with negative delta_t mapped to 0 and flagged.
ExcessPsd excess_force_psd(double delta_t, double mass, double gamma);

}  // namespace cslsim
