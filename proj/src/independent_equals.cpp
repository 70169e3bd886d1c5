#include "coupled/independent_equals.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <fmt/format.h>

#include "coupled/compensated_sum.hpp"
#include "coupled/errors.hpp"
#include "coupled/quadrature.hpp"
#include "coupled/simd.hpp"

namespace coupled {
namespace {

constexpr double kMassTolerance = 1e-12;

double sum_of(std::span<const double> v) {
  CompensatedSum s;
  for (double x : v) s += x;
  return s.value();
}

void check_weights(std::span<const double> p, const char* what) {
  if (p.empty()) throw DomainError(fmt::format("{}: empty probability vector", what));
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw DomainError(fmt::format("{}: entries must be finite and >= 0, got {}", what, x));
    }
  }
}

using EscortKey = std::tuple<std::size_t, double, double, double, double, double>;

class EscortCache {
 public:
  template <class F>
  double get(const EscortKey& key, F compute) {
    {
      std::lock_guard lock(mu_);
      if (auto it = values_.find(key); it != values_.end()) return it->second;
    }
    const double v = compute();
    std::lock_guard lock(mu_);
    return values_.emplace(key, v).first->second;
  }

 private:
  std::mutex mu_;
  std::map<EscortKey, double> values_;
};

EscortCache& escort_cache() {
  static EscortCache cache;
  return cache;
}

EscortKey key_of(const CoupledDistribution& dist, double q) {
  const double alpha = std::holds_alternative<CoupledStretched>(dist)
                           ? std::get<CoupledStretched>(dist).alpha
                           : 0.0;
  return {dist.index(), location(dist), scale(dist), coupling(dist), alpha, q};
}

DensityFunction normalized_power(const DensityFunction& base, double q, double norm) {
  auto pdf = base.pdf;
  return {[pdf, q, norm](double x) {
            const double p = pdf(x);
            return p > 0.0 ? std::pow(p, q) / norm : 0.0;
          },
          base.support};
}

}  // namespace

DiscreteDist::DiscreteDist(std::vector<double> p, int dim) : p_(std::move(p)), dim_(dim) {
  check_weights(p_, "DiscreteDist");
  if (dim < 1) throw DomainError("DiscreteDist: dim must be >= 1");
  const double total = sum_of(p_);
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw DomainError(fmt::format("DiscreteDist: probabilities sum to {:.17g}, not 1", total));
  }
}

DiscreteDist DiscreteDist::normalized(std::vector<double> weights, int dim) {
  check_weights(weights, "DiscreteDist::normalized");
  const double total = sum_of(weights);
  if (!(total > 0.0)) throw DegenerateError("DiscreteDist::normalized: zero total weight");
  for (double& w : weights) w /= total;
  return DiscreteDist(std::move(weights), dim);
}

DiscreteDist escort_discrete(const DiscreteDist& dist, double q) {
  if (!(q >= 0.0) || !std::isfinite(q)) {
    throw DomainError(fmt::format("escort exponent must be finite and >= 0, got {}", q));
  }
  if (q == 1.0) return dist;
  std::vector<double> w(dist.size());
  simd::pow_batch(dist.p(), q, w);
  const double total = sum_of(w);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DegenerateError("escort of a vector with no usable mass");
  }
  for (double& x : w) x /= total;
  return DiscreteDist(std::move(w), dist.dim());
}

double escort_normalizer(const DensityFunction& base, double q) {
  if (!(q >= 0.0)) throw DomainError(fmt::format("escort exponent must be >= 0, got {}", q));
  return quadrature::integrate_or_throw(
      [&](double x) {
        const double p = base(x);
        return p > 0.0 ? std::pow(p, q) : 0.0;
      },
      base.support, "escort normalizer");
}

DensityFunction escort_density(const DensityFunction& base, double q) {
  if (q == 1.0) return base;
  return normalized_power(base, q, escort_normalizer(base, q));
}

DensityFunction escort_density(const CoupledDistribution& dist, double q) {
  const DensityFunction base = as_density(dist);
  if (q == 1.0) return base;
  const double norm =
      escort_cache().get(key_of(dist, q), [&] { return escort_normalizer(base, q); });
  return normalized_power(base, q, norm);
}

double ie_exponent(int m, double kappa, int dim) {
  if (m < 1) throw DomainError("moment order must be >= 1");
  const CouplingContext ctx(kappa, 1.0, dim);
  ctx.require_escort_range();
  return 1.0 + m * kappa / ctx.one_plus_dk();
}

double ie_moment(const CoupledDistribution& dist, int m) {
  const double q = ie_exponent(m, coupling(dist));
  const DensityFunction escort = escort_density(dist, q);
  return quadrature::integrate_or_throw(
      [&](double x) {
        const double p = escort(x);
        return p == 0.0 ? 0.0 : std::pow(x, m) * p;
      },
      escort.support, "independent-equals moment");
}

double ie_moment_empirical(std::span<const double> samples,
                           const std::function<double(double)>& pdf, int m,
                           const CouplingContext& ctx) {
  const double q = ie_exponent(m, ctx.kappa(), ctx.dim());
  std::vector<double> dens(samples.size()), w(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) dens[i] = pdf(samples[i]);
  simd::pow_batch(dens, q - 1.0, w);
  CompensatedSum total, moment;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (w[i] == 0.0) continue;
    total += w[i];
    moment += w[i] * std::pow(samples[i], m);
  }
  if (!(total.value() > 0.0) || !std::isfinite(total.value())) {
    throw DegenerateError("importance weights have no usable mass");
  }
  return moment.value() / total.value();
}

}  // namespace coupled
