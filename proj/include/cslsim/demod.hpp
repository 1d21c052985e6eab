#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cslsim/dynamics.hpp"

namespace cslsim {

/// Output of the lock-in: in-phase and quadrature components of x at the
/// reference, scaled so that x = A cos(w0 t + phi) gives I^2 + Q^2 = A^2 / 2.
struct EnvelopeSample {
  double t = 0.0;   // s, center of the averaging kernel
  double i = 0.0;   // m
  double q = 0.0;   // m
  double x2() const { return 2.0 * (i * i + q * q); }
};

/// FIR weights applied to the mixed signal, on the input sample grid.
struct LowPassKernel {
  double dt = 0.0;  // s
  std::vector<double> weights;
  double memory() const noexcept { return static_cast<double>(weights.size()) * dt; }
};

struct EnvelopeSeries {
  double dt = 0.0;      // output sample interval, s
  double t0 = 0.0;      // time of the first sample, s
  double memory = 0.0;  // s, support of the low-pass kernel
  LowPassKernel kernel;
  std::vector<double> x2;  // m^2
};

/// Streaming quadrature demodulator: mixes with sqrt2 cos and -sqrt2 sin at the
/// center frequency, low-passes I and Q with a unit-gain Hann-kernel FIR whose
/// -3 dB point is bandwidth/2, and decimates to 1/(4 bandwidth).
///
/// The kernel has finite support, so correlations of the output at lags
/// beyond `memory()` are those of the input envelope, undistorted. A
/// recursive filter with the same cutoff has a memory of order 1/bandwidth
/// that blends into the energy autocorrelation when gamma approaches it.
class EnvelopeDetector {
 public:
  /// `gamma` (angular, 1/s) is only used to validate gamma/2pi < bandwidth;
  /// pass 0 to skip that check.
  EnvelopeDetector(double sample_dt, double center_frequency, double bandwidth, double gamma = 0.0);

  std::optional<EnvelopeSample> push(double x);

  double output_interval() const noexcept { return static_cast<double>(stride_) * dt_; }
  double memory() const noexcept { return static_cast<double>(kernel_.size()) * dt_; }
  std::size_t stride() const noexcept { return stride_; }
  LowPassKernel kernel() const { return {dt_, kernel_}; }

 private:
  double dt_;
  double cycles_per_sample_;
  std::vector<double> kernel_;
  std::vector<double> ring_i_;
  std::vector<double> ring_q_;
  std::size_t stride_;
  std::size_t count_ = 0;
};

/// Default lock-in bandwidth for a mode at `center_frequency`.
inline double default_envelope_bandwidth(double center_frequency) { return center_frequency / 6.0; }

/// X^2(t) of a whole series.
EnvelopeSeries envelope_squared(std::span<const double> x, double dt, double center_frequency,
                                double bandwidth, double gamma = 0.0);
EnvelopeSeries envelope_squared(const Trajectory& traj, std::size_t mode, double center_frequency,
                                double bandwidth, double gamma = 0.0);

}  // namespace cslsim
