#include "coupled/entropy.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "coupled/compensated_sum.hpp"
#include "coupled/errors.hpp"
#include "coupled/quadrature.hpp"
#include "coupled/simd.hpp"

namespace coupled {
namespace {

bool near_zero(double x) { return std::abs(x) < kSeriesThreshold; }

void require_alpha_one(const CouplingContext& ctx, const char* what) {
  if (ctx.alpha() != 1.0) {
    throw DomainError(fmt::format("{} is defined for alpha = 1, got {}", what, ctx.alpha()));
  }
}

// sum_i w_i term(i) / sum_i w_i with w = p^q, skipping zero weights.
template <class Term>
double escort_average(const DiscreteDist& p, double q, Term term) {
  std::vector<double> w(p.size());
  simd::pow_batch(p.p(), q, w);
  CompensatedSum num, den;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) continue;
    den += w[i];
    num += w[i] * term(i);
  }
  if (!(den.value() > 0.0) || !std::isfinite(den.value())) {
    throw DegenerateError("escort weights have no usable mass");
  }
  return num.value() / den.value();
}

double integrate(const DensityFunction& f, const std::function<double(double)>& g,
                 const char* what) {
  return quadrature::integrate_or_throw(g, f.support, what);
}

// integral of p^q.
double power_integral(const DensityFunction& f, double q) {
  return integrate(
      f,
      [&](double x) {
        const double p = f(x);
        return p > 0.0 ? std::pow(p, q) : 0.0;
      },
      "power integral");
}

// (1/(ak))(1/Z - 1) with Z = integral p^q: the escort average of
// ln_{ak} p^(-1/(1+dk)) for a normalized density. Evaluated in this form
// because the averaged integrand decays like p itself, which for heavy
// tails is far too slow for quadrature.
double continuous_coupled(const DensityFunction& f, double q, double log_kappa) {
  const double z = power_integral(f, q);
  return (1.0 / z - 1.0) / log_kappa;
}

}  // namespace

double shannon(const DiscreteDist& p) {
  CompensatedSum h;
  for (double x : p.p()) {
    if (x > 0.0) h += -x * std::log(x);
  }
  return h.value();
}

double shannon(const DensityFunction& f) {
  return integrate(
      f,
      [&](double x) {
        const double p = f(x);
        return p > 0.0 ? -p * std::log(p) : 0.0;
      },
      "Shannon entropy");
}

double tsallis(const DiscreteDist& p, const CouplingContext& ctx) {
  ctx.require_escort_range();
  const double ak = ctx.alpha() * ctx.kappa();
  if (near_zero(ak)) return shannon(p);
  const double z = simd::power_sum(p.p(), q_of(ctx));
  return ctx.one_plus_dk() / ak * (1.0 - z);
}

double tsallis(const DensityFunction& f, const CouplingContext& ctx) {
  ctx.require_escort_range();
  const double ak = ctx.alpha() * ctx.kappa();
  if (near_zero(ak)) return shannon(f);
  return ctx.one_plus_dk() / ak * (1.0 - power_integral(f, q_of(ctx)));
}

double normalized_tsallis(const DiscreteDist& p, const CouplingContext& ctx) {
  ctx.require_escort_range();
  const double ak = ctx.alpha() * ctx.kappa();
  if (near_zero(ak)) return shannon(p);
  const double z = simd::power_sum(p.p(), q_of(ctx));
  if (!(z > 0.0)) throw DegenerateError("normalized Tsallis: zero escort normalizer");
  return ctx.one_plus_dk() / ak * (1.0 - z) / z;
}

double normalized_tsallis(const DensityFunction& f, const CouplingContext& ctx) {
  ctx.require_escort_range();
  const double ak = ctx.alpha() * ctx.kappa();
  if (near_zero(ak)) return shannon(f);
  const double z = power_integral(f, q_of(ctx));
  return ctx.one_plus_dk() / ak * (1.0 - z) / z;
}

double coupled_entropy_I(const DiscreteDist& p, const CouplingContext& ctx) {
  require_alpha_one(ctx, "coupled entropy type I");
  ctx.require_escort_range();
  const double k = ctx.kappa();
  if (near_zero(k)) return shannon(p);
  const double e = -1.0 / ctx.one_plus_dk();
  return escort_average(p, 1.0 + k / ctx.one_plus_dk(),
                        [&](std::size_t i) { return coupled_log_pow(p[i], e, k); });
}

double coupled_entropy_I(const DensityFunction& f, const CouplingContext& ctx) {
  require_alpha_one(ctx, "coupled entropy type I");
  ctx.require_escort_range();
  const double k = ctx.kappa();
  if (near_zero(k)) return shannon(f);
  return continuous_coupled(f, 1.0 + k / ctx.one_plus_dk(), k);
}

double coupled_entropy_II(const DiscreteDist& p, const CouplingContext& ctx) {
  const double k = ctx.kappa();
  if (k < 0.0) throw UnsupportedError("coupled entropy type II needs kappa >= 0");
  const double a = ctx.alpha();
  const double e = -a / ctx.one_plus_dk();
  return escort_average(p, 1.0 + k / ctx.one_plus_dk(), [&](std::size_t i) {
    return std::pow(coupled_log_pow(p[i], e, k), 1.0 / a);
  });
}

double coupled_entropy_III(const DiscreteDist& p, const CouplingContext& ctx) {
  const double k = ctx.kappa();
  if (k < 0.0) throw DomainError("coupled entropy type III needs kappa >= 0");
  const double ak = ctx.alpha() * k;
  if (near_zero(ak)) return shannon(p);
  const double e = -1.0 / ctx.one_plus_dk();
  return escort_average(p, q_of(ctx), [&](std::size_t i) { return coupled_log_pow(p[i], e, ak); });
}

double coupled_entropy_III(const DensityFunction& f, const CouplingContext& ctx) {
  const double k = ctx.kappa();
  if (k < 0.0) throw DomainError("coupled entropy type III needs kappa >= 0");
  const double ak = ctx.alpha() * k;
  if (near_zero(ak)) return shannon(f);
  return continuous_coupled(f, q_of(ctx), ak);
}

namespace {

void check_pair(const DiscreteDist& p, const DiscreteDist& r) {
  if (p.size() != r.size()) {
    throw DomainError(fmt::format("distributions differ in length ({} vs {})", p.size(), r.size()));
  }
}

double log_term(double x, double e, double k) {
  if (!(x > 0.0)) throw DivergenceError("reference distribution has no mass where p does");
  return coupled_log_pow(x, e, k);
}

}  // namespace

double coupled_cross_entropy(const DiscreteDist& p, const DiscreteDist& r,
                             const CouplingContext& ctx) {
  require_alpha_one(ctx, "coupled cross-entropy");
  ctx.require_escort_range();
  check_pair(p, r);
  const double k = ctx.kappa();
  const double e = -1.0 / ctx.one_plus_dk();
  return escort_average(p, 1.0 + k / ctx.one_plus_dk(),
                        [&](std::size_t i) { return log_term(r[i], e, k); });
}

double coupled_divergence(const DiscreteDist& p, const DiscreteDist& r,
                          const CouplingContext& ctx, DivergenceForm form) {
  require_alpha_one(ctx, "coupled divergence");
  ctx.require_escort_range();
  check_pair(p, r);
  const double k = ctx.kappa();
  const double opd = ctx.one_plus_dk();
  const double q = 1.0 + k / opd;
  if (form == DivergenceForm::kEntropyDifference) {
    return escort_average(p, q, [&](std::size_t i) {
      return coupled_log_pow(p[i], -1.0 / opd, k) - log_term(r[i], -1.0 / opd, k);
    });
  }
  return escort_average(p, q, [&](std::size_t i) {
    if (!(r[i] > 0.0)) throw DivergenceError("reference distribution has no mass where p does");
    return coupled_log_from_log((std::log(p[i]) - std::log(r[i])) / opd, k);
  });
}

EntropyReport closed_form_entropies_gpd(double sigma, double kappa) {
  if (!(sigma > 0.0)) throw DomainError(fmt::format("sigma must be positive, got {}", sigma));
  if (!(kappa > -1.0)) throw DomainError(fmt::format("kappa must be > -1, got {}", kappa));
  const double r = kappa / (1.0 + kappa);
  const double ln_r_sigma = coupled_log(sigma, r);
  EntropyReport out;
  out.shannon = 1.0 + kappa + std::log(sigma);
  out.coupled = 1.0 + ln_r_sigma;
  out.normalized_tsallis = 1.0 + kappa + (1.0 + kappa) * ln_r_sigma;
  out.tsallis = 1.0 - coupled_log(1.0 / sigma, r) / (1.0 + kappa);
  return out;
}

EntropyReport numeric_entropies(const CoupledDistribution& dist) {
  const DensityFunction f = as_density(dist);
  const CouplingContext ctx(coupling(dist));
  EntropyReport out;
  out.shannon = shannon(f);
  out.tsallis = tsallis(f, ctx);
  out.normalized_tsallis = normalized_tsallis(f, ctx);
  out.coupled = coupled_entropy_I(f, ctx);
  return out;
}

double extensivity_curve(std::uint64_t n, double rho, const CouplingContext& ctx) {
  if (n < 1) throw DomainError("state count must be >= 1");
  if (!(rho > 0.0)) throw DomainError(fmt::format("rho must be positive, got {}", rho));
  return coupled_log_pow(static_cast<double>(n), rho / ctx.one_plus_dk(),
                         ctx.alpha() * ctx.kappa());
}

double coupled_free_energy_mc(std::span<const double> latent_samples,
                              const std::function<double(double)>& log_q,
                              const std::function<double(double)>& log_p_x_given_z,
                              const CouplingContext& ctx) {
  if (latent_samples.empty()) throw DomainError("free energy needs at least one sample");
  const double two_k = 2.0 * ctx.kappa();
  const double opd = ctx.one_plus_dk();
  CompensatedSum total;
  for (double z : latent_samples) {
    const double lq = log_q(z);
    const double lp = log_p_x_given_z(z);
    if (!std::isfinite(lq) || !std::isfinite(lp)) {
      throw DomainError(fmt::format("non-finite log density at z = {}", z));
    }
    total += coupled_log_from_log(-lq / opd, two_k) + coupled_log_from_log(-lp / opd, two_k);
  }
  return 0.5 * total.value() / static_cast<double>(latent_samples.size());
}

ScaleShape escort_gaussian_latent(double sigma, double kappa) {
  if (!(sigma > 0.0)) throw DomainError(fmt::format("sigma must be positive, got {}", sigma));
  if (kappa < 0.0) throw DomainError("coupled Gaussian latent needs kappa >= 0");
  const double shrink = 1.0 + 2.0 * kappa;
  return {sigma / std::sqrt(shrink), kappa / shrink};
}

}  // namespace coupled
