#pragma once

#include <cstddef>
#include <vector>

#include "coupled/independent_equals.hpp"

// Coupled Boltzmann-Gibbs ensemble over discrete energy levels:
//   p_i = exp_k^(-(1+k))(beta E_i) / Z,  U = escort mean of E at q = 1 + k/(1+k).

namespace coupled {

struct Ensemble {
  std::vector<double> energies;
  double beta = 1.0;
  double kappa = 0.0;
};

/// Throws DomainError for an empty ensemble, beta <= 0, kappa < 0, non-finite
/// energies, or 1 + kappa beta E <= 0.
void validate(const Ensemble& e);

/// sum_i exp_k^(-(1+k))(beta E_i), smallest terms first. DegenerateError when
/// every term underflows.
double partition_function(const Ensemble& e);

DiscreteDist bg_probabilities(const Ensemble& e);

/// sum_i P_i^(q) E_i with q = 1 + kappa/(1 + kappa).
double internal_energy(const Ensemble& e);

/// |H_I(p) - (ln_k Z^(1/(1+k)) (+)_k beta U)|, both sides computed separately.
double entropy_identity_residual(const Ensemble& e);

/// |beta U - 1| for W levels at midpoints (i + 1/2) e_max / W. DomainError if
/// the continuous escort keeps more than 1e-4 of its mass beyond e_max.
double continuum_limit_check(double beta, double kappa, std::size_t w, double e_max);

/// T = sigma / k_B, the same for every coupling.
double generalized_temperature(double sigma, double k_b = 1.0);

/// 1/(beta_q k_B) = sigma/((1 + kappa) k_B), which does depend on the coupling.
double q_statistics_temperature(double sigma, double kappa, double k_b = 1.0);

}  // namespace coupled
