#pragma once

#include <functional>

namespace cslsim {

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int initial_panels = 16;
  int max_panels = 200000;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
/// Throws QuadratureError carrying the achieved error estimate when the
/// tolerance max(abs_tol, rel_tol*|I|) cannot be met within max_panels.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Integral over [a, inf) through the map x = a + scale * t / (1 - t).
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       double scale, const QuadratureOptions& opts = {});

}  // namespace cslsim
