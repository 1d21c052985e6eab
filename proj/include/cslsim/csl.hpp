#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cslsim/model.hpp"

namespace cslsim {

struct CslParams {
  double lambda = 0.0;  // collapse rate, 1/s
  double r_c = 1e-7;    // correlation length, m

  void validate() const;
};

enum class DiffusionProvenance { closed_form, numeric_integral };

struct DiffusionConstant {
  double eta = 0.0;  // m^-2 s^-1
  DiffusionProvenance provenance = DiffusionProvenance::closed_form;
};

struct ExclusionPoint {
  double r_c = 0.0;           // m
  double lambda_upper = 0.0;  // 1/s
};

struct ExclusionCurve {
  std::vector<ExclusionPoint> points;
  double confidence_level = 0.95;
  std::string source;

  void validate() const;
};

/// Below this value of x = R^2/r_C^2 the sphere geometry factor is summed as a
/// power series; above it the exponential form is free of cancellation.
inline constexpr double kGeometrySeriesThreshold = 0.5;

/// e^{-x} - 1 + (x/2)(e^{-x} + 1), accurate for every x >= 0.
double sphere_geometry_bracket(double x);

/// Closed-form diffusion constant of a homogeneous sphere.
DiffusionConstant diffusion_constant_sphere(const CslParams& csl, const SphereParams& sphere);

/// Radial profile k -> |mu~(k)|^2 of a spherically symmetric mass density (kg^2).
using RadialFormFactor = std::function<double(double)>;

/// |mu~(k)|^2 of a homogeneous sphere.
RadialFormFactor sphere_form_factor(const SphereParams& sphere);

struct NumericDiffusionOptions {
  double rel_tol = 1e-10;
  double cutoff_factor = 20.0;  // integrate k on [0, cutoff_factor / r_C]
  int initial_panels = 64;
};

/// Diffusion constant from the general k-space integral, reduced to one
/// radial quadrature by spherical symmetry (k_i^2 -> k^2/3).
DiffusionConstant diffusion_constant_numeric(const RadialFormFactor& form_factor,
                                             const CslParams& csl,
                                             const NumericDiffusionOptions& opts = {});

/// S_CSL = hbar^2 eta (two-sided convention).
double csl_force_psd(const DiffusionConstant& eta);

/// T_csl = hbar^2 eta / (2 gamma m k_B).
double csl_temperature_rise(const DiffusionConstant& eta, double mass, double gamma);

/// Largest lambda whose CSL force PSD stays below `excess_force_psd`.
double collapse_rate_upper_bound(double excess_force_psd, double r_c, const SphereParams& sphere);

ExclusionCurve exclusion_curve(double excess_force_psd, const SphereParams& sphere,
                               std::span<const double> r_c_grid, double confidence,
                               std::string source = "this-experiment");

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace cslsim
