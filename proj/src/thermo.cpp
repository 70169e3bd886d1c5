#include "coupled/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "coupled/algebra.hpp"
#include "coupled/compensated_sum.hpp"
#include "coupled/entropy.hpp"
#include "coupled/errors.hpp"
#include "coupled/simd.hpp"

namespace coupled {

namespace {

double bg_weight(double energy, const Ensemble& e) {
  return coupled_exp_power(e.beta * energy, e.kappa, -(1.0 + e.kappa));
}

// Level indices by decreasing energy, so the smallest weights are summed first.
std::vector<std::size_t> descending_order(const Ensemble& e) {
  std::vector<std::size_t> idx(e.energies.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return e.energies[a] > e.energies[b];
  });
  return idx;
}

}  // namespace

void validate(const Ensemble& e) {
  if (e.energies.empty()) throw DomainError("ensemble needs at least one energy level");
  if (!(e.beta > 0.0) || !std::isfinite(e.beta)) {
    throw DomainError(fmt::format("beta must be positive, got {}", e.beta));
  }
  if (!(e.kappa >= 0.0) || !std::isfinite(e.kappa)) {
    throw DomainError(fmt::format("ensemble coupling must be >= 0, got {}", e.kappa));
  }
  for (double en : e.energies) {
    if (!std::isfinite(en)) throw DomainError("energies must be finite");
    if (!(1.0 + e.kappa * e.beta * en > 0.0)) {
      throw DomainError(fmt::format("1 + kappa beta E <= 0 at E = {}", en));
    }
  }
}

double partition_function(const Ensemble& e) {
  validate(e);
  CompensatedSum z;
  for (std::size_t i : descending_order(e)) z += bg_weight(e.energies[i], e);
  const double total = z.value();
  if (!(total > 0.0)) throw DegenerateError("every Boltzmann weight underflows");
  return total;
}

DiscreteDist bg_probabilities(const Ensemble& e) {
  const double z = partition_function(e);
  std::vector<double> p(e.energies.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = bg_weight(e.energies[i], e) / z;
  return DiscreteDist::normalized(std::move(p));
}

double internal_energy(const Ensemble& e) {
  const DiscreteDist probs = bg_probabilities(e);
  const auto order = descending_order(e);
  std::vector<double> p(order.size()), en(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    p[k] = probs[order[k]];
    en[k] = e.energies[order[k]];
  }
  const auto m = simd::escort_moments(p, en, 1.0 + e.kappa / (1.0 + e.kappa));
  return m.first / m.weight;
}

double entropy_identity_residual(const Ensemble& e) {
  const CouplingContext ctx(e.kappa);
  const double lhs = coupled_entropy_I(bg_probabilities(e), ctx);
  const double z = partition_function(e);
  const double rhs = coupled_sum(coupled_log_pow(z, 1.0 / (1.0 + e.kappa), e.kappa),
                                 e.beta * internal_energy(e), e.kappa);
  return std::abs(lhs - rhs);
}

double continuum_limit_check(double beta, double kappa, std::size_t w, double e_max) {
  if (w < 1) throw DomainError("continuum check needs W >= 1");
  if (!(e_max > 0.0) || !std::isfinite(e_max)) throw DomainError("e_max must be positive");
  // The continuous escort is a coupled exponential of coupling k and scale
  // 1/(beta (1+k)); its survival at e_max is (1 + k beta e_max)^(-(1+k)/k).
  const double tail = coupled_exp_power(beta * e_max, kappa, -(1.0 + kappa));
  if (tail > 1e-4) {
    throw DomainError(
        fmt::format("e_max = {} leaves escort tail mass {:.3g} > 1e-4", e_max, tail));
  }
  Ensemble e{std::vector<double>(w), beta, kappa};
  const double h = e_max / static_cast<double>(w);
  for (std::size_t i = 0; i < w; ++i) e.energies[i] = (static_cast<double>(i) + 0.5) * h;
  return std::abs(beta * internal_energy(e) - 1.0);
}

double generalized_temperature(double sigma, double k_b) {
  if (!(sigma > 0.0) || !(k_b > 0.0)) throw DomainError("sigma and k_B must be positive");
  return sigma / k_b;
}

double q_statistics_temperature(double sigma, double kappa, double k_b) {
  if (!(k_b > 0.0)) throw DomainError("k_B must be positive");
  return 1.0 / (beta_q_of(sigma, kappa) * k_b);
}

}  // namespace coupled
