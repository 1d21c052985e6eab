#pragma once

#include "cslsim/model.hpp"

namespace cslsim {

/// Which closed form to use for the stationary position density under
/// combined additive and parametric white noise.
///
/// energy_consistent: marginal of P(eps) ~ (1 + w^2 s^2 eps / (4 gamma kT))^(-4 gamma / (w^2 s^2)),
///   the zero-flux solution of the averaged energy Fokker-Planck equation with
///   the Ito drift of the parametric term. Tends to the equipartition
///   Gaussian with variance kT/(m w^2).
/// as_printed: the published functional form
///   (1 + m w^4 s^2 x^2 / (2 gamma kT))^(-2 (gamma + w^2 s^2) / (w^2 s^2)),
///   whose s -> 0 limit has variance kT/(2 m w^2).
enum class DensityForm { energy_consistent, as_printed };

/// Normalized stationary density of one mode's displacement, p(x) ~ (1 + a x^2)^(-n).
class StationaryDensity {
 public:
  StationaryDensity(const OscillatorMode& mode, double mass, double gamma,
                    double parametric_strength, double t_eff,
                    DensityForm form = DensityForm::energy_consistent);

  double operator()(double x) const;
  /// P(X <= x), by quadrature of the normalized density.
  double cdf(double x) const;

  bool is_gaussian() const noexcept { return a_ == 0.0; }
  /// Gaussian limit variance (exact variance when is_gaussian()).
  double gaussian_variance() const noexcept { return gaussian_variance_; }
  double shape() const noexcept { return a_; }     // a, 1/m^2
  double exponent() const noexcept { return n_; }  // n
  /// Numerically obtained normalization integral of the unnormalized form.
  double normalization() const noexcept { return norm_; }
  /// Closed form sqrt(pi/a) Gamma(n - 1/2) / Gamma(n), for cross-checking.
  double analytic_normalization() const;

 private:
  double unnormalized(double x) const;

  double a_ = 0.0;
  double n_ = 0.0;
  double gaussian_variance_ = 0.0;
  double norm_ = 1.0;
};

/// Convenience wrapper evaluating StationaryDensity at a single point.
double stationary_position_density(double x, const OscillatorMode& mode, double mass,
                                   double gamma, double parametric_strength, double t_eff,
                                   DensityForm form = DensityForm::energy_consistent);

}  // namespace cslsim
