#include <cmath>
#include <random>

#include "doctest.h"

#include "cslsim/demod.hpp"
#include "cslsim/dynamics.hpp"
#include "cslsim/errors.hpp"
#include "cslsim/spectral.hpp"

using namespace cslsim;

namespace {

constexpr double kMass = 4.7e-15;

std::vector<double> tone(double amplitude, double f, double dt, std::size_t n, double phase = 0.3) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amplitude * std::cos(2.0 * constants::pi * f * i * dt + phase);
  return x;
}

SimulationConfig ringdown(double f0, double gamma, double alpha, double x0, double duration) {
  SimulationConfig c;
  c.sphere = SphereParams::from_mass(1e-6, kMass);
  c.modes = {OscillatorMode{f0, alpha, "mode1"}};
  c.gamma = gamma;
  c.noise = {NoiseConfig{}};
  c.duration = duration;
  c.initial_state = std::vector<InitialState>{{x0, 0.0}};
  return c;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("Parseval for a tone: integrated PSD is A^2/2") {
  const double dt = 1e-3, a = 2.5e-6;
  const auto x = tone(a, 37.3, dt, 1 << 16);
  for (const char* w : {"hann", "rect"}) {
    const auto psd = psd_welch(x, dt, 4096, 0.5, w);
    CAPTURE(w);
    CHECK(psd.integral() == doctest::Approx(0.5 * a * a).epsilon(0.01));
  }
}

TEST_CASE("Parseval for white noise") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 2.0);
  std::vector<double> x(1 << 17);
  for (double& v : x) v = n(rng);
  const auto psd = psd_welch(x, 0.01, 1024);
  CHECK(psd.integral() == doctest::Approx(4.0).epsilon(0.03));
  // Flat at 2 v dt in the one-sided convention.
  CHECK(psd.values[200] == doctest::Approx(2.0 * 4.0 * 0.01).epsilon(0.3));
}

TEST_CASE("PSD layout and contract") {
  const auto x = tone(1.0, 5.0, 0.01, 4096);
  const auto psd = psd_welch(x, 0.01, 512, 0.25);
  CHECK(psd.frequencies.front() == 0.0);
  CHECK(psd.frequencies.back() == doctest::Approx(50.0));
  CHECK(psd.frequencies.size() == 257);
  CHECK(psd.resolution() == doctest::Approx(100.0 / 512));
  CHECK(psd.segment_length == 512);
  CHECK(psd.overlap == 0.25);
  CHECK(psd.window == "hann");
  for (double v : psd.values) CHECK(v >= 0.0);
  CHECK_THROWS_AS(psd_welch(x, 0.01, 8192), SizeError);
  CHECK_THROWS_AS(psd_welch(x, 0.01, 512, 0.95), ConfigError);
  CHECK_THROWS_AS(psd_welch(x, 0.01, 512, 0.5, "kaiser"), ConfigError);
}

TEST_CASE("Lorentzian center of a thermal oscillator lies within one bin of f0") {
  const double gamma = 2.0 * constants::pi * 0.4;
  SimulationConfig c = ringdown(12.9, gamma, 0.0, 0.0, 2000.0);
  c.initial_state.reset();
  c.noise = {thermal_noise(gamma, kMass, 298.0)};
  c.record_stride = 4;
  c.seed = 9;
  const auto t = simulate(c);
  const auto psd = psd_welch(t, 0, default_segment_length(t.dt, gamma, t.length()));
  const auto fit = fit_lorentzian(psd, 10.0, 16.0);
  CHECK(std::abs(fit.center - 12.9) <= psd.resolution());
  CHECK(fit.fwhm == doctest::Approx(0.4).epsilon(0.25));
}

TEST_CASE("raw autocorrelation") {
  const std::vector<double> ones(1000, 3.0);
  const auto r = autocorrelation(ones, 10);
  REQUIRE(r.size() == 11);
  CHECK(r[0] == doctest::Approx(9.0).epsilon(1e-12));
  // Biased estimator: (N - k) / N of the product.
  CHECK(r[10] == doctest::Approx(9.0 * 990.0 / 1000.0).epsilon(1e-12));
  std::vector<double> x{1.0, 2.0, -1.0, 0.5};
  const auto s = autocorrelation(x, 2);
  CHECK(s[0] == doctest::Approx((1 + 4 + 1 + 0.25) / 4.0));
  CHECK(s[1] == doctest::Approx((2 - 2 - 0.5) / 4.0));
  CHECK(s[2] == doctest::Approx((-1 + 1) / 4.0));
}

TEST_CASE("envelope of a tone is A^2") {
  const double dt = 1.0 / 2580.0, a = 3e-6, f0 = 12.9;
  const auto x = tone(a, f0, dt, 20 * 2580);
  const auto env = envelope_squared(x, dt, f0, f0 / 6.0);
  REQUIRE(env.x2.size() > 10);
  for (double v : env.x2) CHECK(v == doctest::Approx(a * a).epsilon(1e-3));
  CHECK(env.dt == doctest::Approx(1.0 / (4.0 * f0 / 6.0)).epsilon(0.01));
  CHECK(env.kernel.memory() == doctest::Approx(env.memory));
}

TEST_CASE("envelope bandwidth ordering") {
  const std::vector<double> x(10000, 0.0);
  CHECK_THROWS_AS(envelope_squared(x, 1e-3, 10.0, 2.5), ConfigError);   // b >= f0/5
  CHECK_THROWS_AS(envelope_squared(x, 1e-3, 10.0, 1.0, 7.0), ConfigError);  // gamma/2pi > b
  CHECK_THROWS_AS(envelope_squared(x, 0.05, 10.0, 1.0), ConfigError);   // band above Nyquist
  CHECK_NOTHROW(envelope_squared(x, 1e-3, 10.0, 1.0, 1.0));
}

TEST_CASE("ring-down envelope decays as exp(-gamma t)") {
  const double gamma = 0.2, f0 = 12.9;
  const auto c = ringdown(f0, gamma, 0.0, 1e-6, 15.0);
  const auto t = simulate(c);
  const auto env = envelope_squared(t, 0, f0, f0 / 6.0);
  double worst = 0.0;
  const double ref = env.x2.front() / std::exp(-gamma * env.t0);
  for (std::size_t i = 0; i < env.x2.size(); ++i) {
    const double ti = env.t0 + i * env.dt;
    worst = std::max(worst, std::abs(env.x2[i] / (ref * std::exp(-gamma * ti)) - 1.0));
  }
  CHECK(worst < 0.01);
  // The first envelope sample sits at the kernel center, near X^2(0) = x0^2.
  CHECK(ref == doctest::Approx(1e-12).epsilon(0.01));
}

TEST_CASE("Duffing ring-down: I/Q phase tracks w0 (1 + kappa X^2)") {
  // kappa = 3 alpha / (8 m w0^2), tuned for a 1% shift at X = 10 um.
  const double f0 = 12.9, w0 = 2.0 * constants::pi * f0, gamma = 0.05, x0 = 1e-5;
  const double kappa = 1e8;
  const double alpha = 8.0 * kMass * w0 * w0 * kappa / 3.0;
  const auto c = ringdown(f0, gamma, alpha, x0, 30.0);
  const auto t = simulate(c);
  EnvelopeDetector det(t.dt, f0, 2.0);
  std::vector<EnvelopeSample> s;
  for (double v : t.mode(0))
    if (auto e = det.push(v)) s.push_back(*e);
  REQUIRE(s.size() > 100);
  int checked = 0;
  for (std::size_t i = 20; i + 20 < s.size(); i += 40) {
    const double ph0 = std::atan2(s[i].q, s[i].i), ph1 = std::atan2(s[i + 1].q, s[i + 1].i);
    const double dphi = std::remainder(ph1 - ph0, 2.0 * constants::pi);
    const double shift = dphi / (s[i + 1].t - s[i].t) / w0;
    const double x2 = 0.5 * (s[i].x2() + s[i + 1].x2());
    if (kappa * x2 < 0.003) continue;  // only while X^2 is large
    CAPTURE(s[i].t);
    CHECK(shift == doctest::Approx(kappa * x2).epsilon(0.05));
    ++checked;
  }
  CHECK(checked >= 5);
}

}  // TEST_SUITE
