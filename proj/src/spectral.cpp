#include "cslsim/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numeric>

#include "cslsim/constants.hpp"
#include "cslsim/errors.hpp"

namespace cslsim {

namespace {

// FFTW's planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

// Real-to-complex transform of fixed length n.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_.reset(fftw_alloc_real(n));
    out_.reset(fftw_alloc_complex(n / 2 + 1));
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
    if (!plan_) throw NumericError("FFT plan creation failed");
  }
  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_.get(); }
  void execute() { fftw_execute(plan_); }
  std::complex<double> bin(std::size_t k) const { return {out_.get()[k][0], out_.get()[k][1]}; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::unique_ptr<double, FftwFree> in_;
  std::unique_ptr<fftw_complex, FftwFree> out_;
  fftw_plan plan_ = nullptr;
};

std::vector<double> make_window(const std::string& name, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (name == "hann") {
    // Periodic Hann, the usual choice for spectral averaging.
    for (std::size_t i = 0; i < n; ++i)
      w[i] = 0.5 - 0.5 * std::cos(constants::two_pi * static_cast<double>(i) / static_cast<double>(n));
  } else if (name != "rect") {
    throw ConfigError("unknown window '" + name + "' (expected hann or rect)");
  }
  return w;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

double PsdEstimate::integral() const {
  return std::accumulate(values.begin(), values.end(), 0.0) * resolution();
}

PsdEstimate psd_welch(std::span<const double> x, double dt, std::size_t segment_length, double overlap,
                      const std::string& window) {
  require_positive(dt, "dt");
  if (!(overlap >= 0.0 && overlap <= 0.9)) throw ConfigError("overlap must lie in [0, 0.9]");
  if (segment_length < 8) throw SizeError("segment_length must be at least 8 samples");
  if (segment_length > x.size()) {
    throw SizeError("series of " + std::to_string(x.size()) + " samples is shorter than the segment length " +
                    std::to_string(segment_length));
  }
  const std::size_t n = segment_length;
  const auto w = make_window(window, n);
  const double w2 = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
  const auto step = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * (1.0 - overlap))));

  RealFft fft(n);
  const std::size_t bins = n / 2 + 1;
  std::vector<double> acc(bins, 0.0);
  std::size_t segments = 0;
  for (std::size_t start = 0; start + n <= x.size(); start += step) {
    const auto seg = x.subspan(start, n);
    const double mean = std::accumulate(seg.begin(), seg.end(), 0.0) / static_cast<double>(n);
    double* in = fft.input();
    for (std::size_t i = 0; i < n; ++i) in[i] = (seg[i] - mean) * w[i];
    fft.execute();
    for (std::size_t k = 0; k < bins; ++k) acc[k] += std::norm(fft.bin(k));
    ++segments;
  }

  PsdEstimate psd;
  psd.segment_length = n;
  psd.window = window;
  psd.overlap = overlap;
  psd.frequencies.resize(bins);
  psd.values.resize(bins);
  const double fs = 1.0 / dt;
  const double scale = 1.0 / (fs * w2 * static_cast<double>(segments));
  for (std::size_t k = 0; k < bins; ++k) {
    psd.frequencies[k] = static_cast<double>(k) * fs / static_cast<double>(n);
    // Fold negative frequencies; DC and Nyquist appear once.
    const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
    psd.values[k] = acc[k] * scale * (edge ? 1.0 : 2.0);
  }
  return psd;
}

PsdEstimate psd_welch(const Trajectory& traj, std::size_t mode, std::size_t segment_length, double overlap,
                      const std::string& window) {
  if (mode >= traj.mode_count()) throw ConfigError("trajectory has no mode " + std::to_string(mode + 1));
  return psd_welch(traj.mode(mode), traj.dt, segment_length, overlap, window);
}

std::size_t default_segment_length(double dt, double gamma, std::size_t n) {
  require_positive(dt, "dt");
  require_positive(gamma, "gamma");
  const double want = 16.0 * 2.0 / gamma / dt;
  std::size_t p = next_pow2(static_cast<std::size_t>(std::max(8.0, want)));
  if (static_cast<double>(p) > 1.5 * want && p > 8) p >>= 1;  // round to nearest
  while (p > n && p > 8) p >>= 1;
  return p;
}

LorentzianFit fit_lorentzian(const PsdEstimate& psd, double f_lo, double f_hi) {
  double smax = 0.0;
  for (std::size_t k = 0; k < psd.frequencies.size(); ++k) {
    if (psd.frequencies[k] >= f_lo && psd.frequencies[k] <= f_hi) smax = std::max(smax, psd.values[k]);
  }
  if (!(smax > 0.0)) throw FitError("no spectral power in the fit band");
  // Weighted least squares of 1/S = c0 + c1 u + c2 u^2 with u centered on the
  // band for conditioning; weights S^2 equalize the relative scatter.
  const double fc = 0.5 * (f_lo + f_hi);
  double m[3][3] = {};
  double rhs[3] = {};
  int used = 0;
  for (std::size_t k = 0; k < psd.frequencies.size(); ++k) {
    const double f = psd.frequencies[k];
    const double s = psd.values[k];
    if (f < f_lo || f > f_hi || s < 0.5 * smax) continue;
    const double u = f - fc;
    const double basis[3] = {1.0, u, u * u};
    const double wgt = s * s;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) m[a][b] += wgt * basis[a] * basis[b];
      rhs[a] += wgt * basis[a] / s;
    }
    ++used;
  }
  if (used < 3) throw FitError("too few bins above half maximum for a Lorentzian fit");
  // 3x3 solve by Cramer's rule.
  auto det3 = [](const double a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double d = det3(m);
  if (d == 0.0 || !std::isfinite(d)) throw FitError("singular Lorentzian fit");
  double c[3];
  for (int col = 0; col < 3; ++col) {
    double t[3][3];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) t[a][b] = b == col ? rhs[a] : m[a][b];
    c[col] = det3(t) / d;
  }
  if (!(c[2] > 0.0)) throw FitError("spectrum is not peaked in the fit band");
  const double u0 = -c[1] / (2.0 * c[2]);
  const double half_width_sq = c[0] / c[2] - u0 * u0;
  if (!(half_width_sq > 0.0)) throw FitError("Lorentzian fit produced a non-positive width");
  LorentzianFit fit;
  fit.center = fc + u0;
  fit.fwhm = 2.0 * std::sqrt(half_width_sq);
  fit.peak = 1.0 / (c[2] * half_width_sq);
  return fit;
}

PeakShape analyze_peak(const PsdEstimate& psd, double f_lo, double f_hi, double floor_fraction) {
  std::size_t lo = psd.frequencies.size(), hi = 0;
  for (std::size_t k = 0; k < psd.frequencies.size(); ++k) {
    if (psd.frequencies[k] >= f_lo && psd.frequencies[k] <= f_hi) {
      lo = std::min(lo, k);
      hi = k;
    }
  }
  if (lo > hi) throw SizeError("no PSD bins in the requested band");
  std::size_t kmax = lo;
  for (std::size_t k = lo; k <= hi; ++k)
    if (psd.values[k] > psd.values[kmax]) kmax = k;
  const double smax = psd.values[kmax];
  if (!(smax > 0.0)) throw FitError("no spectral power in the band");

  // Outermost crossings of a level, interpolated linearly between bins.
  auto span_at = [&](double level) {
    std::size_t a = kmax, b = kmax;
    for (std::size_t k = lo; k <= hi; ++k) {
      if (psd.values[k] >= level) {
        a = std::min(a, k);
        b = std::max(b, k);
      }
    }
    auto cross = [&](std::size_t inside, std::size_t outside) {
      const double s_in = psd.values[inside], s_out = psd.values[outside];
      const double t = (s_in - level) / (s_in - s_out);
      return psd.frequencies[inside] + t * (psd.frequencies[outside] - psd.frequencies[inside]);
    };
    const double left = a > lo ? cross(a, a - 1) : psd.frequencies[a];
    const double right = b < hi ? cross(b, b + 1) : psd.frequencies[b];
    return std::pair{std::pair{a, b}, right - left};
  };

  PeakShape shape;
  shape.peak_frequency = psd.frequencies[kmax];
  shape.fwhm = span_at(0.5 * smax).second;
  const auto [region, unused] = span_at(floor_fraction * smax);
  (void)unused;
  double w = 0.0, m1 = 0.0;
  for (std::size_t k = region.first; k <= region.second; ++k) {
    w += psd.values[k];
    m1 += psd.values[k] * psd.frequencies[k];
  }
  shape.centroid = m1 / w;
  double m2 = 0.0, m3 = 0.0;
  for (std::size_t k = region.first; k <= region.second; ++k) {
    const double d = psd.frequencies[k] - shape.centroid;
    m2 += psd.values[k] * d * d;
    m3 += psd.values[k] * d * d * d;
  }
  m2 /= w;
  m3 /= w;
  shape.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  return shape;
}

std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  if (n == 0) throw SizeError("autocorrelation of an empty series");
  if (max_lag >= n) throw SizeError("max_lag must be shorter than the series");
  const std::size_t m = next_pow2(n + max_lag + 1);
  RealFft forward(m);
  double* in = forward.input();
  std::copy(x.begin(), x.end(), in);
  std::fill(in + n, in + m, 0.0);
  forward.execute();

  // Inverse of the power spectrum through a complex-to-real plan.
  const std::size_t bins = m / 2 + 1;
  std::unique_ptr<fftw_complex, FftwFree> spec(fftw_alloc_complex(bins));
  std::unique_ptr<double, FftwFree> out(fftw_alloc_real(m));
  for (std::size_t k = 0; k < bins; ++k) {
    spec.get()[k][0] = std::norm(forward.bin(k));
    spec.get()[k][1] = 0.0;
  }
  fftw_plan back;
  {
    std::lock_guard lock(planner_mutex());
    back = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec.get(), out.get(), FFTW_ESTIMATE);
  }
  if (!back) throw NumericError("FFT plan creation failed");
  fftw_execute(back);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(back);
  }
  std::vector<double> r(max_lag + 1);
  const double norm = 1.0 / (static_cast<double>(m) * static_cast<double>(n));
  for (std::size_t k = 0; k <= max_lag; ++k) r[k] = out.get()[k] * norm;
  return r;
}

}  // namespace cslsim
