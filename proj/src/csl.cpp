#include "cslsim/csl.hpp"

#include <cmath>
#include <sstream>

#include "cslsim/errors.hpp"
#include "cslsim/quadrature.hpp"

namespace cslsim {

void CslParams::validate() const {
  require_non_negative(lambda, "lambda");
  require_positive(r_c, "r_c");
}

void ExclusionCurve::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].lambda_upper > 0.0)) throw DomainError("exclusion curve: lambda_upper must be > 0");
    if (i > 0 && !(points[i].r_c > points[i - 1].r_c))
      throw DomainError("exclusion curve: r_c must be strictly increasing");
  }
}

double sphere_geometry_bracket(double x) {
  if (x < 0.0) throw DomainError("sphere_geometry_bracket: x must be >= 0");
  if (x < kGeometrySeriesThreshold) {
    // sum_{n>=3} (-1)^n (2 - n) x^n / (2 n!)
    double term = x * x * x / 6.0;  // x^n / n! at n = 3
    double sum = 0.0;
    for (int n = 3; n < 40; ++n) {
      const double contribution = ((n % 2 == 0) ? 1.0 : -1.0) * (2.0 - n) * 0.5 * term;
      sum += contribution;
      if (std::abs(contribution) < 1e-18 * std::abs(sum)) break;
      term *= x / (n + 1);
    }
    return sum;
  }
  const double em1 = std::expm1(-x);
  return em1 + 0.5 * x * (em1 + 2.0);
}

DiffusionConstant diffusion_constant_sphere(const CslParams& csl, const SphereParams& sphere) {
  csl.validate();
  const double r_c = csl.r_c;
  const double radius = sphere.radius();
  const double m_ratio = sphere.mass() / constants::m0;
  const double x = (radius * radius) / (r_c * r_c);
  // 6 r_C^4 / R^6 written as 6 / (r_C^2 x^3) to keep both limits in range.
  const double prefactor = 6.0 * csl.lambda * m_ratio * m_ratio / (r_c * r_c * x * x * x);
  return {prefactor * sphere_geometry_bracket(x), DiffusionProvenance::closed_form};
}

RadialFormFactor sphere_form_factor(const SphereParams& sphere) {
  const double radius = sphere.radius();
  const double mass = sphere.mass();
  return [radius, mass](double k) {
    const double u = k * radius;
    double shape;
    if (u < 1e-2) {
      const double u2 = u * u;
      shape = 1.0 - u2 / 10.0 + u2 * u2 / 280.0 - u2 * u2 * u2 / 15120.0;
    } else {
      shape = 3.0 * (std::sin(u) - u * std::cos(u)) / (u * u * u);
    }
    const double amp = mass * shape;
    return amp * amp;
  };
}

DiffusionConstant diffusion_constant_numeric(const RadialFormFactor& form_factor,
                                             const CslParams& csl,
                                             const NumericDiffusionOptions& opts) {
  csl.validate();
  if (csl.lambda == 0.0) return {0.0, DiffusionProvenance::numeric_integral};
  const double r_c = csl.r_c;
  // Integrate in the dimensionless variable q = k r_C:
  // eta = (4 lambda / (3 sqrt(pi) m0^2 r_C^2)) * int q^4 |mu~(q/r_C)|^2 e^{-q^2} dq
  auto integrand = [&](double q) {
    const double value = form_factor(q / r_c);
    if (!(value >= 0.0) || !std::isfinite(value))
      throw DomainError("diffusion_constant_numeric: form factor must be finite and non-negative");
    const double q2 = q * q;
    return q2 * q2 * (value / (constants::m0 * constants::m0)) * std::exp(-q2);
  };
  QuadratureOptions qo;
  qo.rel_tol = opts.rel_tol;
  qo.initial_panels = opts.initial_panels;
  const QuadratureResult res = integrate(integrand, 0.0, opts.cutoff_factor, qo);
  const double eta = 4.0 * csl.lambda * res.value / (3.0 * std::sqrt(constants::pi) * r_c * r_c);
  return {eta, DiffusionProvenance::numeric_integral};
}

double csl_force_psd(const DiffusionConstant& eta) {
  require_non_negative(eta.eta, "eta");
  return constants::hbar * constants::hbar * eta.eta;
}

double csl_temperature_rise(const DiffusionConstant& eta, double mass, double gamma) {
  require_positive(mass, "mass");
  require_positive(gamma, "gamma");
  return csl_force_psd(eta) / (2.0 * gamma * mass * constants::k_B);
}

double collapse_rate_upper_bound(double excess_force_psd, double r_c, const SphereParams& sphere) {
  if (!(excess_force_psd > 0.0)) {
    throw DomainError("no positive excess budget; bound undefined");
  }
  const DiffusionConstant unit = diffusion_constant_sphere({1.0, r_c}, sphere);
  return excess_force_psd / (constants::hbar * constants::hbar) / unit.eta;
}

ExclusionCurve exclusion_curve(double excess_force_psd, const SphereParams& sphere,
                               std::span<const double> r_c_grid, double confidence,
                               std::string source) {
  for (std::size_t i = 0; i < r_c_grid.size(); ++i) {
    require_positive(r_c_grid[i], "r_c grid value");
    if (i > 0 && !(r_c_grid[i] > r_c_grid[i - 1]))
      throw DomainError("r_c grid must be strictly increasing");
  }
  ExclusionCurve curve;
  curve.confidence_level = confidence;
  curve.source = std::move(source);
  curve.points.reserve(r_c_grid.size());
  for (double r_c : r_c_grid) {
    curve.points.push_back({r_c, collapse_rate_upper_bound(excess_force_psd, r_c, sphere)});
  }
  return curve;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  require_positive(lo, "grid lower end");
  require_positive(hi, "grid upper end");
  if (n < 1) throw DomainError("grid needs at least one point");
  if (n == 1) return {lo};
  if (!(hi > lo)) throw DomainError("grid upper end must exceed lower end");
  std::vector<double> grid(n);
  const double l0 = std::log10(lo);
  const double step = (std::log10(hi) - l0) / (n - 1);
  for (int i = 0; i < n; ++i) grid[i] = std::pow(10.0, l0 + step * i);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

}  // namespace cslsim
