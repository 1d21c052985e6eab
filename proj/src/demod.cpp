#include "cslsim/demod.hpp"

#include <cmath>

#include "cslsim/constants.hpp"
#include "cslsim/errors.hpp"

namespace cslsim {

namespace {

// -3 dB half-width of a Hann kernel of duration L is about 0.72 / L.
constexpr double kHannHalfPowerProduct = 0.72;

}  // namespace

EnvelopeDetector::EnvelopeDetector(double sample_dt, double center_frequency, double bandwidth, double gamma)
    : dt_(sample_dt), cycles_per_sample_(center_frequency * sample_dt) {
  require_positive(sample_dt, "sample_dt");
  require_positive(center_frequency, "center_frequency");
  require_positive(bandwidth, "bandwidth");
  if (!(bandwidth < center_frequency / 5.0))
    throw ConfigError("envelope bandwidth must be below center_frequency/5");
  if (gamma > 0.0 && !(angular_to_hz(gamma) < bandwidth))
    throw ConfigError("envelope bandwidth must exceed gamma/2pi");
  if (!(center_frequency + bandwidth < 0.5 / sample_dt))
    throw ConfigError("sample rate too low for the demodulation band");

  const double duration = kHannHalfPowerProduct / (0.5 * bandwidth);
  const auto n = static_cast<std::size_t>(std::max(3.0, std::round(duration / sample_dt)));
  kernel_.resize(n);
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    kernel_[k] = 0.5 - 0.5 * std::cos(constants::two_pi * (static_cast<double>(k) + 0.5) / static_cast<double>(n));
    sum += kernel_[k];
  }
  for (double& w : kernel_) w /= sum;
  ring_i_.assign(n, 0.0);
  ring_q_.assign(n, 0.0);
  stride_ = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / (4.0 * bandwidth * sample_dt))));
}

std::optional<EnvelopeSample> EnvelopeDetector::push(double x) {
  // Phase in cycles, reduced exactly enough for runs of ~1e10 samples.
  const double cycles = std::fmod(static_cast<double>(count_) * cycles_per_sample_, 1.0);
  const double phase = constants::two_pi * cycles;
  const std::size_t n = kernel_.size();
  const std::size_t slot = count_ % n;
  ring_i_[slot] = std::sqrt(2.0) * x * std::cos(phase);
  ring_q_[slot] = -std::sqrt(2.0) * x * std::sin(phase);
  const std::size_t k = count_++;
  if (k + 1 < n || (k + 1 - n) % stride_ != 0) return std::nullopt;
  // Oldest sample sits at slot + 1; the kernel is symmetric so order only
  // matters for bookkeeping.
  double i = 0.0, q = 0.0;
  std::size_t pos = (slot + 1) % n;
  for (std::size_t j = 0; j < n; ++j) {
    i += kernel_[j] * ring_i_[pos];
    q += kernel_[j] * ring_q_[pos];
    if (++pos == n) pos = 0;
  }
  const double center = (static_cast<double>(k) - 0.5 * static_cast<double>(n - 1)) * dt_;
  return EnvelopeSample{center, i, q};
}

EnvelopeSeries envelope_squared(std::span<const double> x, double dt, double center_frequency, double bandwidth,
                                double gamma) {
  EnvelopeDetector det(dt, center_frequency, bandwidth, gamma);
  EnvelopeSeries out;
  out.dt = det.output_interval();
  out.memory = det.memory();
  out.kernel = det.kernel();
  out.x2.reserve(x.size() / det.stride() + 1);
  bool first = true;
  for (double v : x) {
    if (auto s = det.push(v)) {
      if (first) {
        out.t0 = s->t;
        first = false;
      }
      out.x2.push_back(s->x2());
    }
  }
  if (out.x2.empty()) throw SizeError("series shorter than the lock-in kernel");
  return out;
}

EnvelopeSeries envelope_squared(const Trajectory& traj, std::size_t mode, double center_frequency, double bandwidth,
                                double gamma) {
  if (mode >= traj.mode_count()) throw ConfigError("trajectory has no mode " + std::to_string(mode + 1));
  return envelope_squared(traj.mode(mode), traj.dt, center_frequency, bandwidth, gamma);
}

}  // namespace cslsim
