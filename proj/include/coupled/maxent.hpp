#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coupled/distributions.hpp"
#include "coupled/independent_equals.hpp"

// Numerical check that the coupled exponential maximizes the Type I coupled
// entropy under normalization and a fixed independent-equals mean.

namespace coupled {

/// A distribution discretized on a uniform grid. Cell masses are exact
/// survival differences; each cell is represented by its mean-value point,
/// where the density equals mass/width.
struct DiscreteGrid {
  DiscreteDist probs;
  std::vector<double> points;
  double lower = 0.0;
  double upper = 0.0;
  double cell_width = 0.0;
  double truncated_mass = 0.0;  // survival beyond `upper`, removed by renormalizing
};

/// Grid from the support's lower end to the survival-(1 - coverage) quantile
/// (or the compact upper end). n_points >= 16, coverage in (0, 1).
DiscreteGrid discretize(const CoupledDistribution& dist, std::size_t n_points, double coverage);

/// Same on an explicit [lower, upper] inside the support.
DiscreteGrid discretize_range(const CoupledDistribution& dist, std::size_t n_points, double lower,
                              double upper);

/// sum P^(q)_i x_i.
double escort_mean(const DiscreteDist& p, std::span<const double> points, double q);

/// Escort exponent of the mean constraint, 1 + kappa/(1 + kappa).
double mean_constraint_exponent(double kappa);

/// Random multiplicative perturbation of p with total variation about
/// `magnitude`, projected back onto sum = 1 and escort mean = target by an
/// exponential tilt. Throws ConvergenceError if the projection stalls.
DiscreteDist feasible_perturbation(const DiscreteDist& p, std::span<const double> points,
                                   double kappa, double target, double magnitude,
                                   std::uint64_t seed);

struct ConstraintStats {
  double z_p;  // integral p^((1+2k)/(1+k))
  double n_p;  // integral x p^((1+2k)/(1+k))
};

/// Closed forms for CoupledExponential(0, sigma, kappa).
ConstraintStats constraint_stats(double sigma, double kappa);
ConstraintStats constraint_stats_numeric(double sigma, double kappa);

struct MultiplierPair {
  double lambda0;
  double lambda1;
};

/// lambda1 = sigma^(-1/(1+k)), lambda0 = -((1+2k)/k) sigma^(k/(1+k)). kappa > 0.
MultiplierPair lagrange_multipliers(double sigma, double kappa);

/// sup over `grid` of |dL/dp(y)| for the Lagrangian of the maxent problem,
/// evaluated at the exact coupled exponential with closed-form constants.
double stationarity_residual(double sigma, double kappa, std::span<const double> grid);

struct MaxentOptions {
  std::size_t n_points = 4096;
  double coverage = 0.9999;
  double min_magnitude = 1e-6;
  double max_magnitude = 1e-3;
  double tolerance = 1e-9;
};

struct MaxentReport {
  double sigma = 0.0;
  double kappa = 0.0;
  std::size_t trials = 0;
  /// "maximum" for kappa >= 0, "minimum" for kappa < 0 (the claim tested).
  std::string claim;
  std::size_t violations = 0;
  std::size_t strict_decreases = 0;  // dH < -1e-12
  std::size_t strict_increases = 0;  // dH > +1e-12
  double h_star = 0.0;
  double max_delta_h = 0.0;
  double min_delta_h = 0.0;
  double ie_mean_target = 0.0;
  double max_constraint_error = 0.0;
  double grid_upper = 0.0;
  double truncated_mass = 0.0;
  bool passed() const { return violations == 0; }
};

MaxentReport maxent_check(double sigma, double kappa, std::size_t n_trials, std::uint64_t seed,
                          const MaxentOptions& opts = {});

}  // namespace coupled
