#include "coupled/distributions.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <fmt/format.h>

#include "coupled/algebra.hpp"
#include "coupled/errors.hpp"
#include "coupled/quadrature.hpp"
#include "coupled/random.hpp"

namespace coupled {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void check_common(double mu, double sigma, double kappa, const char* family) {
  if (!std::isfinite(mu)) throw DomainError(fmt::format("{}: mu must be finite", family));
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError(fmt::format("{}: sigma must be positive, got {}", family, sigma));
  }
  if (!std::isfinite(kappa)) throw DomainError(fmt::format("{}: kappa must be finite", family));
}

// Upper support end for kappa < 0 with survival exponent alpha.
double compact_end(double mu, double sigma, double kappa, double alpha) {
  return kappa < 0.0 ? mu + sigma * std::pow(-1.0 / kappa, 1.0 / alpha) : kInf;
}

// 1-sided unnormalized shape (1 + kappa t^alpha)^(-(1+kappa)/(alpha kappa)).
double stretched_shape(double t, double kappa, double alpha) {
  return coupled_exp_power(std::pow(t, alpha), kappa, -(1.0 + kappa) / alpha);
}

class NormalizerCache {
 public:
  template <class F>
  double get(const std::tuple<double, double, double>& key, F compute) {
    {
      std::lock_guard lock(mu_);
      if (auto it = values_.find(key); it != values_.end()) return it->second;
    }
    const double v = compute();
    std::lock_guard lock(mu_);
    return values_.emplace(key, v).first->second;  // first writer wins
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<double, double, double>, double> values_;
};

NormalizerCache& stretched_cache() {
  static NormalizerCache cache;
  return cache;
}

double gaussian_z(double sigma, double kappa) {
  return kappa == 0.0 ? sigma * std::sqrt(2.0 * std::numbers::pi)
                      : gaussian_normalizer(sigma, kappa);
}

// Unit-scale density in z; the caller divides by sigma or the normalizer.
struct Evaluator {
  CoupledDistribution dist;
  double norm = 1.0;  // divides the shape

  double operator()(double x) const {
    return std::visit(
        Overloaded{
            [&](const CoupledExponential& d) {
              const double z = (x - d.mu) / d.sigma;
              if (z < 0.0) return 0.0;
              return coupled_exp_power(z, d.kappa, -(1.0 + d.kappa)) / norm;
            },
            [&](const CoupledWeibull& d) {
              const double z = (x - d.mu) / d.sigma;
              if (z < 0.0) return 0.0;
              return z * coupled_exp_power(z * z, d.kappa, -(1.0 + 2.0 * d.kappa) / 2.0) / norm;
            },
            [&](const CoupledGaussian& d) {
              const double z = (x - d.mu) / d.sigma;
              return coupled_exp_power(z * z, d.kappa, -(1.0 + d.kappa) / 2.0) / norm;
            },
            [&](const CoupledStretched& d) {
              const double z = (x - d.mu) / d.sigma;
              if (z < 0.0) return 0.0;
              return stretched_shape(z, d.kappa, d.alpha) / norm;
            }},
        dist);
  }
};

Evaluator make_evaluator(const CoupledDistribution& dist) {
  validate(dist);
  const double norm = std::visit(
      Overloaded{[](const CoupledExponential& d) { return d.sigma; },
                 [](const CoupledWeibull& d) { return d.sigma; },
                 [](const CoupledGaussian& d) { return gaussian_z(d.sigma, d.kappa); },
                 [](const CoupledStretched& d) {
                   return stretched_normalizer(d.sigma, d.kappa, d.alpha);
                 }},
      dist);
  return {dist, norm};
}

double check_u(double u) {
  if (!(u > 0.0 && u <= 1.0)) {
    throw DomainError(fmt::format("quantile level must lie in (0, 1], got {}", u));
  }
  return u;
}

double gaussian_survival(const CoupledGaussian& d, double x) {
  const double z = (x - d.mu) / d.sigma;
  if (d.kappa == 0.0) return 0.5 * std::erfc(z / std::numbers::sqrt2);
  if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
  const Evaluator f = make_evaluator(d);
  quadrature::Options opts;
  opts.abs_tol = 1e-13;
  const double tail = quadrature::integrate_or_throw(
      f, Support::half_line(std::abs(z) * d.sigma + d.mu, d.sigma), "coupled Gaussian survival",
      opts);
  return z >= 0.0 ? tail : 1.0 - tail;
}

double gaussian_quantile(const CoupledGaussian& d, double u) {
  if (u == 1.0) return -kInf;
  if (d.kappa == 0.0) {
    return d.mu + d.sigma * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
  }
  if (u == 0.5) return d.mu;
  // Symmetric: solve on the upper half for min(u, 1-u).
  const double v = u < 0.5 ? u : 1.0 - u;
  const double sign = u < 0.5 ? 1.0 : -1.0;
  auto g = [&](double z) { return gaussian_survival(d, d.mu + d.sigma * z) - v; };
  double hi = 1.0;
  while (g(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw ConvergenceError("coupled Gaussian quantile: bracket not found");
  }
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      g, 0.0, hi, 0.5 - v, g(hi), boost::math::tools::eps_tolerance<double>(52), iters);
  return d.mu + sign * d.sigma * 0.5 * (r.first + r.second);
}

double stretched_survival(const CoupledStretched& d, double x) {
  const double z = (x - d.mu) / d.sigma;
  if (z <= 0.0) return 1.0;
  if (std::isinf(z)) return 0.0;
  const double w = std::pow(z, d.alpha);
  if (d.kappa == 0.0) return boost::math::gamma_q(1.0 / d.alpha, w / d.alpha);
  // kappa w/(1 + kappa w) ~ Beta(1/alpha, 1/(alpha kappa)).
  return boost::math::ibeta(1.0 / (d.alpha * d.kappa), 1.0 / d.alpha, 1.0 / (1.0 + d.kappa * w));
}

double stretched_quantile(const CoupledStretched& d, double u) {
  if (u == 1.0) return d.mu;
  double w;
  if (d.kappa == 0.0) {
    w = d.alpha * boost::math::gamma_q_inv(1.0 / d.alpha, u);
  } else {
    const double y = boost::math::ibeta_inv(1.0 / (d.alpha * d.kappa), 1.0 / d.alpha, u);
    w = (1.0 / y - 1.0) / d.kappa;
  }
  return d.mu + d.sigma * std::pow(w, 1.0 / d.alpha);
}

}  // namespace

void validate(const CoupledDistribution& dist) {
  std::visit(Overloaded{[](const CoupledExponential& d) {
                          check_common(d.mu, d.sigma, d.kappa, "CoupledExponential");
                          if (!(d.kappa > -1.0))
                            throw DomainError("CoupledExponential: kappa must be > -1");
                        },
                        [](const CoupledWeibull& d) {
                          check_common(d.mu, d.sigma, d.kappa, "CoupledWeibull");
                          if (!(d.kappa > -1.0))
                            throw DomainError("CoupledWeibull: kappa must be > -1");
                        },
                        [](const CoupledGaussian& d) {
                          check_common(d.mu, d.sigma, d.kappa, "CoupledGaussian");
                          if (d.kappa < 0.0)
                            throw DomainError("CoupledGaussian: kappa must be >= 0");
                        },
                        [](const CoupledStretched& d) {
                          check_common(d.mu, d.sigma, d.kappa, "CoupledStretched");
                          if (d.kappa < 0.0)
                            throw DomainError("CoupledStretched: kappa must be >= 0");
                          if (!(d.alpha > 0.0) || !std::isfinite(d.alpha))
                            throw DomainError("CoupledStretched: alpha must be positive");
                        }},
             dist);
}

double location(const CoupledDistribution& dist) {
  return std::visit([](const auto& d) { return d.mu; }, dist);
}
double scale(const CoupledDistribution& dist) {
  return std::visit([](const auto& d) { return d.sigma; }, dist);
}
double coupling(const CoupledDistribution& dist) {
  return std::visit([](const auto& d) { return d.kappa; }, dist);
}

std::string describe(const CoupledDistribution& dist) {
  return std::visit(
      Overloaded{[](const CoupledExponential& d) {
                   return fmt::format("CoupledExponential(mu={}, sigma={}, kappa={})", d.mu,
                                      d.sigma, d.kappa);
                 },
                 [](const CoupledWeibull& d) {
                   return fmt::format("CoupledWeibull(mu={}, sigma={}, kappa={})", d.mu, d.sigma,
                                      d.kappa);
                 },
                 [](const CoupledGaussian& d) {
                   return fmt::format("CoupledGaussian(mu={}, sigma={}, kappa={})", d.mu,
                                      d.sigma, d.kappa);
                 },
                 [](const CoupledStretched& d) {
                   return fmt::format("CoupledStretched(mu={}, sigma={}, kappa={}, alpha={})",
                                      d.mu, d.sigma, d.kappa, d.alpha);
                 }},
      dist);
}

Support support(const CoupledDistribution& dist) {
  validate(dist);
  return std::visit(
      Overloaded{
          [](const CoupledExponential& d) {
            const double end = compact_end(d.mu, d.sigma, d.kappa, 1.0);
            return std::isinf(end) ? Support::half_line(d.mu, d.sigma)
                                   : Support::interval(d.mu, end);
          },
          [](const CoupledWeibull& d) {
            const double end = compact_end(d.mu, d.sigma, d.kappa, 2.0);
            return std::isinf(end) ? Support::half_line(d.mu, d.sigma)
                                   : Support::interval(d.mu, end);
          },
          [](const CoupledGaussian& d) { return Support::real_line(d.mu, d.sigma); },
          [](const CoupledStretched& d) { return Support::half_line(d.mu, d.sigma); }},
      dist);
}

double density(const CoupledDistribution& dist, double x) { return make_evaluator(dist)(x); }

DensityFunction as_density(const CoupledDistribution& dist) {
  return {make_evaluator(dist), support(dist)};
}

double survival(const CoupledDistribution& dist, double x) {
  validate(dist);
  return std::visit(
      Overloaded{[&](const CoupledExponential& d) {
                   const double z = (x - d.mu) / d.sigma;
                   return z <= 0.0 ? 1.0 : coupled_exp_power(z, d.kappa, -1.0);
                 },
                 [&](const CoupledWeibull& d) {
                   const double z = (x - d.mu) / d.sigma;
                   return z <= 0.0 ? 1.0 : coupled_exp_power(z * z, d.kappa, -0.5);
                 },
                 [&](const CoupledGaussian& d) { return gaussian_survival(d, x); },
                 [&](const CoupledStretched& d) { return stretched_survival(d, x); }},
      dist);
}

double quantile(const CoupledDistribution& dist, double u) {
  validate(dist);
  check_u(u);
  return std::visit(
      Overloaded{[&](const CoupledExponential& d) {
                   return d.mu + d.sigma * coupled_log_pow(u, -1.0, d.kappa);
                 },
                 [&](const CoupledWeibull& d) {
                   // z^2 = (u^(-2 kappa) - 1)/kappa = 2 ln_{2 kappa}(1/u)
                   const double z2 = 2.0 * coupled_log_pow(u, -1.0, 2.0 * d.kappa);
                   return d.mu + d.sigma * std::sqrt(std::max(z2, 0.0));
                 },
                 [&](const CoupledGaussian& d) { return gaussian_quantile(d, u); },
                 [&](const CoupledStretched& d) { return stretched_quantile(d, u); }},
      dist);
}

std::vector<double> sample(const CoupledDistribution& dist, std::size_t n, std::uint64_t seed) {
  validate(dist);
  if (n == 0) throw DomainError("sample size must be >= 1");
  std::vector<double> out(n);
  const std::uint64_t base = tagged_seed(seed, StreamTag::kSample);
  if (const auto* g = std::get_if<CoupledGaussian>(&dist)) {
    boost::random::normal_distribution<double> normal;
    if (g->kappa == 0.0) {
      for (std::size_t i = 0; i < n; ++i) {
        SplitMix64 rng = substream(base, i);
        out[i] = g->mu + g->sigma * normal(rng);
      }
      return out;
    }
    // Student-t as a normal over sqrt(chi^2_nu / nu), chi^2_nu = Gamma(nu/2, 2).
    const double nu = 1.0 / g->kappa;
    boost::random::gamma_distribution<double> chi2(0.5 * nu, 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      SplitMix64 rng = substream(base, i);
      const double z = normal(rng);
      const double c = chi2(rng);
      out[i] = g->mu + g->sigma * z / std::sqrt(c / nu);
    }
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 rng = substream(base, i);
    out[i] = quantile(dist, uniform_open01(rng));
  }
  return out;
}

double gaussian_normalizer(double sigma, double kappa) {
  if (!(sigma > 0.0)) throw DomainError(fmt::format("sigma must be positive, got {}", sigma));
  if (!(kappa > 0.0)) {
    throw UnsupportedError(fmt::format("coupled Gaussian normalizer needs kappa > 0, got {}", kappa));
  }
  // Gamma(a)/Gamma(a + 1/2) with a = 1/(2 kappa).
  const double a = 0.5 / kappa;
  return sigma * std::sqrt(std::numbers::pi / kappa) * boost::math::tgamma_delta_ratio(a, 0.5);
}

double stretched_normalizer(double sigma, double kappa, double alpha) {
  validate(CoupledStretched{0.0, sigma, kappa, alpha});
  const double unit = stretched_cache().get({kappa, alpha, 0.0}, [&] {
    quadrature::Options opts;
    opts.abs_tol = 1e-13;
    return quadrature::integrate_or_throw(
        [&](double t) { return stretched_shape(t, kappa, alpha); }, Support::half_line(0.0, 1.0),
        "stretched normalizer", opts);
  });
  return sigma * unit;
}

double score_at_scale(const CoupledDistribution& dist) {
  validate(dist);
  const auto* d = std::get_if<CoupledExponential>(&dist);
  if (!d) {
    throw UnsupportedError("score_at_scale is defined for the coupled exponential only");
  }
  // d/dx ln f = -(1+kappa)/(sigma (1 + kappa z)) at z = 1.
  return -(1.0 + d->kappa) / (d->sigma * (1.0 + d->kappa));
}

ScaleShape ie_power_transform(double sigma, double kappa) {
  if (!(sigma > 0.0)) throw DomainError(fmt::format("sigma must be positive, got {}", sigma));
  if (!(kappa > -1.0)) throw DomainError(fmt::format("kappa must be > -1, got {}", kappa));
  return {sigma / (1.0 + kappa), kappa / (1.0 + kappa)};
}

double raw_moment(const CoupledDistribution& dist, int m) {
  if (m < 1) throw DomainError("moment order must be >= 1");
  const DensityFunction f = as_density(dist);
  const double kappa = coupling(dist);
  if (kappa > 0.0 && kappa * m >= 1.0) {
    throw DivergenceError(fmt::format(
        "raw moment {} of {} diverges (kappa >= 1/m)", m, describe(dist)));
  }
  return quadrature::integrate_or_throw(
      [&](double x) {
        const double p = f(x);
        return p == 0.0 ? 0.0 : std::pow(x, m) * p;
      },
      f.support, "raw moment");
}

double q_exponential_density(double x, double beta_q, double q) {
  if (!(beta_q > 0.0)) throw DomainError("beta_q must be positive");
  if (!(q < 2.0)) throw DomainError("q-exponential needs q < 2");
  if (x < 0.0) return 0.0;
  return beta_q * (2.0 - q) * coupled_exp_power(beta_q * x, q - 1.0, -1.0);
}

}  // namespace coupled
