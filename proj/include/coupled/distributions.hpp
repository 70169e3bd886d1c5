#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "coupled/density.hpp"

namespace coupled {

/// Generalized Pareto: S(x) = (1 + kappa z)^(-1/kappa), z = (x - mu)/sigma.
struct CoupledExponential {
  double mu = 0.0;
  double sigma = 1.0;
  double kappa = 0.0;
};

/// alpha = 2 survival family: S(x) = (1 + kappa z^2)^(-1/(2 kappa)).
struct CoupledWeibull {
  double mu = 0.0;
  double sigma = 1.0;
  double kappa = 0.0;
};

/// Two-sided, (1 + kappa z^2)^(-(1+kappa)/(2 kappa)) / Z. Student-t with
/// nu = 1/kappa scaled by sigma.
struct CoupledGaussian {
  double mu = 0.0;
  double sigma = 1.0;
  double kappa = 0.0;
};

/// One-sided on [mu, inf): (1 + kappa z^alpha)^(-(1+kappa)/(alpha kappa)) / Z.
struct CoupledStretched {
  double mu = 0.0;
  double sigma = 1.0;
  double kappa = 0.0;
  double alpha = 1.0;
};

using CoupledDistribution =
    std::variant<CoupledExponential, CoupledWeibull, CoupledGaussian, CoupledStretched>;

/// Throws DomainError when parameters violate the family's invariants.
void validate(const CoupledDistribution& dist);

double location(const CoupledDistribution& dist);
double scale(const CoupledDistribution& dist);
double coupling(const CoupledDistribution& dist);
std::string describe(const CoupledDistribution& dist);

/// Integration domain; compact on the right for kappa < 0 (Exponential and
/// Weibull), where x_max = mu + sigma (-1/kappa)^(1/alpha).
Support support(const CoupledDistribution& dist);

double density(const CoupledDistribution& dist, double x);

/// Density evaluator with the normalizer resolved once.
DensityFunction as_density(const CoupledDistribution& dist);

/// P(X > x).
double survival(const CoupledDistribution& dist, double x);

/// Inverse survival: the x with survival(x) = u, u in (0, 1]. u = 1 gives
/// the lower support end (mu, or -inf for the Gaussian).
double quantile(const CoupledDistribution& dist, double u);

/// n draws, deterministic in (dist, n, seed). Draw i depends only on
/// (seed, i).
std::vector<double> sample(const CoupledDistribution& dist, std::size_t n, std::uint64_t seed);

/// Z = sigma sqrt(pi/kappa) Gamma(1/(2 kappa)) / Gamma((1+kappa)/(2 kappa)).
/// kappa <= 0 is unsupported.
double gaussian_normalizer(double sigma, double kappa);

/// Normalizer of the stretched family, by quadrature, cached per parameter
/// set.
double stretched_normalizer(double sigma, double kappa, double alpha);

/// d/dx ln f at x = mu + sigma; -1/sigma for every kappa. Exponential only.
double score_at_scale(const CoupledDistribution& dist);

struct ScaleShape {
  double sigma;
  double kappa;
};

/// (sigma/(1+kappa), kappa/(1+kappa)): the coupled exponential raised to
/// (1+2kappa)/(1+kappa) and renormalized.
ScaleShape ie_power_transform(double sigma, double kappa);

/// E[X^m] by quadrature. Throws DivergenceError when kappa >= 1/m, where the
/// power-law tail makes the moment infinite.
double raw_moment(const CoupledDistribution& dist, int m);

/// q-exponential density beta_q (2 - q) exp_q-style (1 + (q-1) beta_q x)^(1/(1-q))
/// on x >= 0; the q-statistics parameterization of the same curve family.
double q_exponential_density(double x, double beta_q, double q);

}  // namespace coupled
