#pragma once

#include <cstddef>
#include <functional>
#include <string_view>

#include "coupled/density.hpp"

// Adaptive Gauss-Kronrod (G10/K21) with global bisection. Infinite ends are
// handled by the substitution x = end +/- scale*(1-s)/s on s in (0, 1], which
// never evaluates the integrand at s = 0.

namespace coupled::quadrature {

struct Options {
  double abs_tol = 1e-11;
  double rel_tol = 1e-12;
  std::size_t max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Integral over [a, b]; either end may be infinite.
Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

/// Integral over a support descriptor (uses its center/scale for the tails).
Result integrate(const Integrand& f, const Support& support, const Options& opts = {});

/// Like integrate() but throws: DivergenceError for a non-finite value or an
/// unconverged integral whose tail decays no faster than 1/x,
/// ConvergenceError when the tolerance was otherwise not met. `what` names the integral
/// in the message.
double integrate_or_throw(const Integrand& f, const Support& support, std::string_view what,
                          const Options& opts = {});

}  // namespace coupled::quadrature
