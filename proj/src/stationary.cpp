#include "cslsim/stationary.hpp"

#include <cmath>
#include <string>

#include "cslsim/constants.hpp"
#include "cslsim/errors.hpp"
#include "cslsim/quadrature.hpp"

namespace cslsim {

StationaryDensity::StationaryDensity(const OscillatorMode& mode, double mass, double gamma,
                                     double parametric_strength, double t_eff, DensityForm form) {
  mode.validate();
  require_positive(mass, "mass");
  require_positive(gamma, "gamma");
  require_positive(t_eff, "t_eff");
  require_non_negative(parametric_strength, "parametric_strength");

  const double w2 = mode.angular_frequency() * mode.angular_frequency();
  const double kT = constants::k_B * t_eff;
  const double s2 = parametric_strength * parametric_strength;
  const double ratio = s2 * w2 / gamma;  // w^2 s^2 / gamma

  gaussian_variance_ = form == DensityForm::energy_consistent ? kT / (mass * w2) : kT / (2.0 * mass * w2);
  if (s2 == 0.0) {
    norm_ = std::sqrt(constants::two_pi * gaussian_variance_);
    return;
  }
  if (form == DensityForm::energy_consistent) {
    a_ = mass * w2 * w2 * s2 / (8.0 * gamma * kT);
    n_ = 4.0 / ratio - 0.5;
  } else {
    a_ = mass * w2 * w2 * s2 / (2.0 * gamma * kT);
    n_ = 2.0 * (1.0 + ratio) / ratio;
  }
  if (!(n_ > 0.5)) {
    throw DomainError("stationary density is not normalizable: exponent " + std::to_string(n_) +
                      " must exceed 1/2");
  }
  // Integrate in units of the Gaussian-limit width so the map is well scaled.
  const double scale = std::sqrt(gaussian_variance_);
  QuadratureOptions opts;
  opts.rel_tol = 1e-12;
  const auto half = integrate_to_infinity([this](double x) { return unnormalized(x); }, 0.0, scale, opts);
  norm_ = 2.0 * half.value;
}

double StationaryDensity::unnormalized(double x) const {
  if (a_ == 0.0) return std::exp(-0.5 * x * x / gaussian_variance_);
  return std::exp(-n_ * std::log1p(a_ * x * x));
}

double StationaryDensity::operator()(double x) const { return unnormalized(x) / norm_; }

double StationaryDensity::cdf(double x) const {
  if (a_ == 0.0) return 0.5 * std::erfc(-x / std::sqrt(2.0 * gaussian_variance_));
  if (x == 0.0) return 0.5;
  QuadratureOptions opts;
  opts.rel_tol = 1e-10;
  opts.abs_tol = 1e-14 * norm_;
  const double inner = integrate([this](double u) { return unnormalized(u); }, 0.0, std::abs(x), opts).value / norm_;
  return x > 0.0 ? 0.5 + inner : 0.5 - inner;
}

double StationaryDensity::analytic_normalization() const {
  if (a_ == 0.0) return std::sqrt(constants::two_pi * gaussian_variance_);
  return std::sqrt(constants::pi / a_) * std::exp(std::lgamma(n_ - 0.5) - std::lgamma(n_));
}

double stationary_position_density(double x, const OscillatorMode& mode, double mass, double gamma,
                                   double parametric_strength, double t_eff, DensityForm form) {
  return StationaryDensity(mode, mass, gamma, parametric_strength, t_eff, form)(x);
}

}  // namespace cslsim
