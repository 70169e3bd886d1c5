#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "coupled/algebra.hpp"
#include "coupled/density.hpp"
#include "coupled/distributions.hpp"

namespace coupled {

/// Probability vector over W states; `dim` only enters the 1 + d*kappa
/// exponents.
class DiscreteDist {
 public:
  /// Throws DomainError unless entries are finite, non-negative and sum to 1
  /// within 1e-12.
  explicit DiscreteDist(std::vector<double> p, int dim = 1);

  /// Scales non-negative weights to unit mass. Zero total is degenerate.
  static DiscreteDist normalized(std::vector<double> weights, int dim = 1);

  std::span<const double> p() const { return p_; }
  std::size_t size() const { return p_.size(); }
  int dim() const { return dim_; }
  double operator[](std::size_t i) const { return p_[i]; }

 private:
  std::vector<double> p_;
  int dim_ = 1;
};

/// p_i^q / sum_j p_j^q with 0^q = 0 for every q (zero states stay excluded).
DiscreteDist escort_discrete(const DiscreteDist& dist, double q);

/// Integral of p^q over the support. Throws DivergenceError if infinite.
double escort_normalizer(const DensityFunction& base, double q);

/// p^q / integral(p^q), the normalizer computed once at construction.
DensityFunction escort_density(const DensityFunction& base, double q);

/// Escort density of a coupled distribution; the normalizer is cached per
/// (distribution, q) across calls.
DensityFunction escort_density(const CoupledDistribution& dist, double q);

/// Escort exponent of the m-th independent-equals moment, 1 + m kappa/(1 + d kappa).
double ie_exponent(int m, double kappa, int dim = 1);

/// integral x^m P^(q)(x) dx with q = ie_exponent(m, kappa).
double ie_moment(const CoupledDistribution& dist, int m);

/// Self-normalized importance estimate of the IE moment from draws of the
/// base density: weights p(x_i)^(q-1), q = ie_exponent(m, ctx.kappa(), ctx.dim()).
double ie_moment_empirical(std::span<const double> samples,
                           const std::function<double(double)>& pdf, int m,
                           const CouplingContext& ctx);

}  // namespace coupled
