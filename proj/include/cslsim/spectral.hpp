#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cslsim/dynamics.hpp"

namespace cslsim {

/// One-sided displacement PSD. Integrating `values` over frequency gives the
/// series variance.
struct PsdEstimate {
  std::vector<double> frequencies;  // Hz, 0 .. Nyquist
  std::vector<double> values;       // m^2/Hz
  std::size_t segment_length = 0;
  std::string window;
  double overlap = 0.0;

  double resolution() const { return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0; }
  /// Trapezoid-free rectangle sum, the discrete counterpart of the variance.
  double integral() const;
};

/// Welch estimate with mean removal per segment. `window` is "hann" or "rect".
PsdEstimate psd_welch(std::span<const double> x, double dt, std::size_t segment_length,
                      double overlap = 0.5, const std::string& window = "hann");
PsdEstimate psd_welch(const Trajectory& traj, std::size_t mode, std::size_t segment_length,
                      double overlap = 0.5, const std::string& window = "hann");

/// 16 correlation times (2/gamma each) rounded to a power of two, capped at n.
std::size_t default_segment_length(double dt, double gamma, std::size_t n);

struct LorentzianFit {
  double center = 0.0;  // Hz
  double fwhm = 0.0;    // Hz
  double peak = 0.0;    // m^2/Hz
};

/// Fits 1/S to a quadratic in f over the bins in [f_lo, f_hi] that lie above
/// half the band maximum.
LorentzianFit fit_lorentzian(const PsdEstimate& psd, double f_lo, double f_hi);

struct PeakShape {
  double peak_frequency = 0.0;  // Hz, bin of the band maximum
  double fwhm = 0.0;            // Hz, between the outermost half-maximum crossings
  double centroid = 0.0;        // Hz
  double skewness = 0.0;        // third standardized moment of the peak region
};

/// Shape of the dominant peak within [f_lo, f_hi]. The peak region used for
/// centroid and skewness spans the outermost bins above `floor_fraction` of
/// the maximum.
PeakShape analyze_peak(const PsdEstimate& psd, double f_lo, double f_hi, double floor_fraction = 0.1);

/// Biased raw product moment r[k] = (1/N) sum_i x[i] x[i+k], k = 0..max_lag,
/// by zero-padded FFT.
std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag);

}  // namespace cslsim
