#include "coupled/maxent.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>
#include <boost/random/normal_distribution.hpp>
#include <fmt/format.h>

#include "coupled/compensated_sum.hpp"
#include "coupled/entropy.hpp"
#include "coupled/errors.hpp"
#include "coupled/quadrature.hpp"
#include "coupled/random.hpp"
#include "coupled/simd.hpp"

namespace coupled {
namespace {

constexpr int kProjectionIterations = 100;
constexpr double kNoiseFloor = 1e-12;

// Point in [a, b] where f equals `level`; the midpoint if f does not cross it.
double mean_value_point(const DensityFunction& f, double a, double b, double level) {
  auto g = [&](double x) { return f(x) - level; };
  const double ga = g(a), gb = g(b);
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  if ((ga > 0.0) == (gb > 0.0)) return 0.5 * (a + b);
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      g, a, b, ga, gb, boost::math::tools::eps_tolerance<double>(53), iters);
  return 0.5 * (r.first + r.second);
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s.value();
}

void normalize(std::vector<double>& w) {
  CompensatedSum s;
  for (double x : w) s += x;
  const double total = s.value();
  if (!(total > 0.0) || !std::isfinite(total)) throw DegenerateError("perturbation lost all mass");
  for (double& x : w) x /= total;
}

struct TiltState {
  double mean;
  double variance;
};

TiltState escort_stats(std::span<const double> p, std::span<const double> x, double q) {
  const auto m = simd::escort_moments(p, x, q);
  const double mean = m.first / m.weight;
  return {mean, std::max(m.second / m.weight - mean * mean, 0.0)};
}

}  // namespace

DiscreteGrid discretize_range(const CoupledDistribution& dist, std::size_t n_points, double lower,
                              double upper) {
  if (n_points < 16) throw DomainError(fmt::format("need at least 16 cells, got {}", n_points));
  const Support s = support(dist);
  if (!(upper > lower) || !std::isfinite(lower) || !std::isfinite(upper) ||
      lower < s.lower || upper > s.upper) {
    throw DomainError(fmt::format("grid [{}, {}] must be finite and inside the support", lower, upper));
  }
  const DensityFunction f = as_density(dist);
  const double width = (upper - lower) / static_cast<double>(n_points);
  std::vector<double> mass(n_points), points(n_points);
  double s_prev = survival(dist, lower);
  for (std::size_t j = 0; j < n_points; ++j) {
    const double a = lower + width * j;
    const double b = j + 1 == n_points ? upper : lower + width * (j + 1);
    const double s_next = survival(dist, b);
    mass[j] = std::max(s_prev - s_next, 0.0);
    points[j] = mean_value_point(f, a, b, mass[j] / (b - a));
    s_prev = s_next;
  }
  const double covered = survival(dist, lower) - s_prev;
  DiscreteGrid g{DiscreteDist::normalized(std::move(mass)), std::move(points), lower, upper, width,
                 s_prev};
  if (!(covered > 0.0)) throw DegenerateError("grid covers no probability mass");
  return g;
}

DiscreteGrid discretize(const CoupledDistribution& dist, std::size_t n_points, double coverage) {
  if (!(coverage > 0.0 && coverage < 1.0)) {
    throw DomainError(fmt::format("coverage must lie in (0, 1), got {}", coverage));
  }
  const Support s = support(dist);
  if (std::isinf(s.lower)) {
    throw UnsupportedError("discretize needs a support bounded below");
  }
  const double upper = std::isfinite(s.upper) ? s.upper : quantile(dist, 1.0 - coverage);
  if (!std::isfinite(upper) || !(upper > s.lower)) {
    throw DomainError(fmt::format("coverage {} is not reachable for {}", coverage, describe(dist)));
  }
  return discretize_range(dist, n_points, s.lower, upper);
}

double escort_mean(const DiscreteDist& p, std::span<const double> points, double q) {
  if (points.size() != p.size()) throw DomainError("escort_mean: length mismatch");
  const auto m = simd::escort_moments(p.p(), points, q);
  if (!(m.weight > 0.0)) throw DegenerateError("escort_mean: zero escort weight");
  return m.first / m.weight;
}

double mean_constraint_exponent(double kappa) {
  if (!(kappa > -1.0)) throw DomainError(fmt::format("kappa must be > -1, got {}", kappa));
  return 1.0 + kappa / (1.0 + kappa);
}

DiscreteDist feasible_perturbation(const DiscreteDist& p, std::span<const double> points,
                                   double kappa, double target, double magnitude,
                                   std::uint64_t seed) {
  if (points.size() != p.size()) throw DomainError("feasible_perturbation: length mismatch");
  if (!(magnitude >= 0.0)) throw DomainError("perturbation magnitude must be >= 0");
  if (magnitude == 0.0) return p;
  const double q = mean_constraint_exponent(kappa);
  if (!(q > 0.0)) {
    throw UnsupportedError("mean constraint is insensitive to tilting when q <= 0");
  }
  const std::size_t n = p.size();
  const std::span<const double> base = p.p();

  SplitMix64 rng = substream(tagged_seed(seed, StreamTag::kPerturbation), 0);
  boost::random::normal_distribution<double> normal;
  std::vector<double> noise(n);
  for (double& g : noise) g = normal(rng);

  auto shaken = [&](double eps) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = base[i] * std::exp(eps * noise[i]);
    normalize(w);
    return w;
  };
  // TV is linear in eps to first order; one rescale lands close to `magnitude`.
  const double tv_probe = total_variation(shaken(magnitude), base);
  const double eps = tv_probe > 0.0 ? magnitude * magnitude / tv_probe : magnitude;
  const std::vector<double> start = shaken(eps);

  // Newton on the tilt t in w_i = start_i exp(t (x_i - target)); the escort
  // mean moves at rate q * Var_escort(x). Iterate to rounding level: any
  // residual constraint error shifts H at first order.
  const double scale = std::max(1.0, std::abs(target));
  const double accept = 1e-8 * scale;
  std::vector<double> w = start, best;
  double best_err = INFINITY;
  double t = 0.0;
  for (int it = 0; it < kProjectionIterations; ++it) {
    const TiltState st = escort_stats(w, points, q);
    const double err = st.mean - target;
    if (std::abs(err) >= best_err) break;  // stalled at rounding level
    best_err = std::abs(err);
    best = w;
    if (best_err <= 1e-15 * scale) break;
    const double slope = q * st.variance;
    if (!(slope > 0.0)) break;
    t -= err / slope;
    for (std::size_t i = 0; i < n; ++i) w[i] = start[i] * std::exp(t * (points[i] - target));
    normalize(w);
  }
  if (best_err <= accept) return DiscreteDist(std::move(best), p.dim());
  throw ConvergenceError(
      fmt::format("feasible_perturbation: projection did not converge in {} iterations",
                  kProjectionIterations));
}

ConstraintStats constraint_stats(double sigma, double kappa) {
  if (!(sigma > 0.0)) throw DomainError(fmt::format("sigma must be positive, got {}", sigma));
  if (!(kappa > -0.5)) throw DomainError("constraint stats need kappa > -1/2");
  const double z = std::pow(sigma, -kappa / (1.0 + kappa)) / (1.0 + kappa);
  return {z, std::pow(sigma, 1.0 / (1.0 + kappa)) / (1.0 + kappa)};
}

ConstraintStats constraint_stats_numeric(double sigma, double kappa) {
  const DensityFunction f = as_density(CoupledExponential{0.0, sigma, kappa});
  const double q = (1.0 + 2.0 * kappa) / (1.0 + kappa);
  auto powered = [&](double x) {
    const double p = f(x);
    return p > 0.0 ? std::pow(p, q) : 0.0;
  };
  const double z = quadrature::integrate_or_throw(powered, f.support, "Z_P");
  const double nn =
      quadrature::integrate_or_throw([&](double x) { return x * powered(x); }, f.support, "N_P");
  return {z, nn};
}

MultiplierPair lagrange_multipliers(double sigma, double kappa) {
  if (!(sigma > 0.0)) throw DomainError(fmt::format("sigma must be positive, got {}", sigma));
  if (!(kappa > 0.0)) throw DomainError("Lagrange multipliers need kappa > 0");
  return {-((1.0 + 2.0 * kappa) / kappa) * std::pow(sigma, kappa / (1.0 + kappa)),
          std::pow(sigma, -1.0 / (1.0 + kappa))};
}

double stationarity_residual(double sigma, double kappa, std::span<const double> grid) {
  const MultiplierPair lam = lagrange_multipliers(sigma, kappa);
  const ConstraintStats c = constraint_stats(sigma, kappa);
  const CoupledDistribution dist = CoupledExponential{0.0, sigma, kappa};
  const double a = (1.0 + 2.0 * kappa) / (1.0 + kappa);
  double worst = 0.0;
  for (double y : grid) {
    const double pk = std::pow(density(dist, y), kappa / (1.0 + kappa));
    const double z2 = c.z_p * c.z_p;
    const double r = -a / kappa * pk / z2 - lam.lambda0 -
                     lam.lambda1 * a * pk * (y * c.z_p - c.n_p) / z2;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

MaxentReport maxent_check(double sigma, double kappa, std::size_t n_trials, std::uint64_t seed,
                          const MaxentOptions& opts) {
  const CoupledDistribution dist = CoupledExponential{0.0, sigma, kappa};
  const DiscreteGrid grid = discretize(dist, opts.n_points, opts.coverage);
  const CouplingContext ctx(kappa);
  const double q = mean_constraint_exponent(kappa);

  MaxentReport rep;
  rep.sigma = sigma;
  rep.kappa = kappa;
  rep.trials = n_trials;
  rep.claim = kappa >= 0.0 ? "maximum" : "minimum";
  rep.h_star = coupled_entropy_I(grid.probs, ctx);
  rep.ie_mean_target = escort_mean(grid.probs, grid.points, q);
  rep.grid_upper = grid.upper;
  rep.truncated_mass = grid.truncated_mass;
  rep.max_delta_h = -INFINITY;
  rep.min_delta_h = INFINITY;

  const double log_lo = std::log(opts.min_magnitude), log_hi = std::log(opts.max_magnitude);
  for (std::size_t t = 0; t < n_trials; ++t) {
    SplitMix64 rng = substream(seed, t);
    const double magnitude = std::exp(log_lo + (log_hi - log_lo) * uniform_open01(rng));
    const DiscreteDist p = feasible_perturbation(grid.probs, grid.points, kappa,
                                                 rep.ie_mean_target, magnitude,
                                                 derive_seed(seed, t));
    const double dh = coupled_entropy_I(p, ctx) - rep.h_star;
    rep.max_delta_h = std::max(rep.max_delta_h, dh);
    rep.min_delta_h = std::min(rep.min_delta_h, dh);
    rep.max_constraint_error = std::max(
        rep.max_constraint_error, std::abs(escort_mean(p, grid.points, q) - rep.ie_mean_target));
    if (dh < -kNoiseFloor) ++rep.strict_decreases;
    if (dh > kNoiseFloor) ++rep.strict_increases;
    const bool violated = kappa >= 0.0 ? dh > opts.tolerance : dh < -opts.tolerance;
    if (violated) ++rep.violations;
  }
  return rep;
}

}  // namespace coupled
