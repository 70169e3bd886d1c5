#include "coupled/sde.hpp"

#include <algorithm>
#include <cmath>

#include <boost/random/normal_distribution.hpp>
#include <fmt/format.h>

#include "coupled/errors.hpp"
#include "coupled/random.hpp"
#include "coupled/simd.hpp"

namespace coupled {

namespace {

constexpr double kOverflowGuard = 1e12;
constexpr std::size_t kLanes = 8;
constexpr std::size_t kChunkSteps = 256;

std::uint64_t ceil_inverse(double tau, double dt) {
  return static_cast<std::uint64_t>(std::ceil(1.0 / (tau * dt) - 1e-9));
}

// One RNG stream per path; each step draws the additive then the
// multiplicative increment.
struct PathNoise {
  explicit PathNoise(const SdeConfig& cfg, std::uint64_t path)
      : rng(substream(tagged_seed(cfg.seed, StreamTag::kSdePath), path)) {}
  SplitMix64 rng;
  boost::random::normal_distribution<double> normal;
  void draw(double& za, double& zm) {
    za = normal(rng);
    zm = normal(rng);
  }
};

void check_guard(double x, std::uint64_t path) {
  if (!(std::abs(x) <= kOverflowGuard)) {
    throw UnstableError(fmt::format("path {} left |x| <= 1e12 (x = {})", path, x));
  }
}

// Steps each retention segment: burn_in first, then thin at a time.
template <typename Advance, typename Retain>
void run_schedule(const SdeConfig& cfg, Advance&& advance, Retain&& retain) {
  const std::uint64_t thin = effective_thin(cfg);
  const std::uint64_t keep = samples_per_path(cfg);
  std::uint64_t burn = effective_burn_in(cfg);
  while (burn > 0) {
    const std::uint64_t n = std::min<std::uint64_t>(burn, kChunkSteps);
    advance(n);
    burn -= n;
  }
  for (std::uint64_t k = 0; k < keep; ++k) {
    std::uint64_t left = thin;
    while (left > 0) {
      const std::uint64_t n = std::min<std::uint64_t>(left, kChunkSteps);
      advance(n);
      left -= n;
    }
    retain(k);
  }
}

// Paths first..first+lanes-1 on the identity kernel, written path-major into out.
void simulate_identity_group(const SdeConfig& cfg, std::uint64_t first, std::size_t lanes,
                             double* out) {
  const simd::HeunParams hp{cfg.tau, cfg.additive, cfg.multiplicative, cfg.dt};
  const std::uint64_t keep = samples_per_path(cfg);
  std::vector<PathNoise> noise;
  noise.reserve(lanes);
  for (std::size_t l = 0; l < lanes; ++l) noise.emplace_back(cfg, first + l);
  std::vector<double> x(lanes, 0.0);
  std::vector<double> za(kChunkSteps * lanes), zm(kChunkSteps * lanes);

  auto advance = [&](std::uint64_t steps) {
    for (std::size_t s = 0; s < steps; ++s) {
      for (std::size_t l = 0; l < lanes; ++l) noise[l].draw(za[s * lanes + l], zm[s * lanes + l]);
    }
    simd::heun_identity_block(x, za, zm, steps, hp);
    for (std::size_t l = 0; l < lanes; ++l) check_guard(x[l], first + l);
  };
  auto retain = [&](std::uint64_t k) {
    for (std::size_t l = 0; l < lanes; ++l) out[l * keep + k] = x[l];
  };
  run_schedule(cfg, advance, retain);
}

void simulate_shaped_path(const SdeConfig& cfg, std::uint64_t path, double* out) {
  const auto& g = cfg.shape->g;
  const auto& gp = cfg.shape->g_prime;
  const double sq = std::sqrt(cfg.dt);
  const double a_sqdt = cfg.additive * sq;
  const double m_sqdt = cfg.multiplicative * sq;
  auto drift = [&](double v) { return -cfg.tau * g(v) * gp(v); };
  PathNoise noise(cfg, path);
  double x = 0.0;
  auto advance = [&](std::uint64_t steps) {
    for (std::uint64_t s = 0; s < steps; ++s) {
      double za, zm;
      noise.draw(za, zm);
      const double da = a_sqdt * za;
      const double dm = m_sqdt * zm;
      const double fx = drift(x);
      const double gx = g(x);
      const double xp = ((x + fx * cfg.dt) + da) + gx * dm;
      x = ((x + (0.5 * (fx + drift(xp))) * cfg.dt) + da) + (0.5 * (gx + g(xp))) * dm;
    }
    check_guard(x, path);
  };
  run_schedule(cfg, advance, [&](std::uint64_t k) { out[k] = x; });
}

}  // namespace

void validate(const SdeConfig& cfg) {
  if (!(cfg.additive > 0.0) || !std::isfinite(cfg.additive)) {
    throw DomainError("additive amplitude A must be positive");
  }
  if (!(cfg.multiplicative >= 0.0) || !std::isfinite(cfg.multiplicative)) {
    throw DomainError("multiplicative amplitude M must be >= 0");
  }
  if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau)) throw DomainError("tau must be positive");
  if (!(cfg.dt > 0.0)) throw DomainError("dt must be positive");
  const double stiffness = cfg.dt * (cfg.tau + cfg.multiplicative * cfg.multiplicative);
  if (stiffness > 0.1) {
    throw DomainError(fmt::format("dt (tau + M^2) = {} exceeds 0.1", stiffness));
  }
  if (cfg.n_steps < 1 || cfg.n_paths < 1) throw DomainError("n_steps and n_paths must be >= 1");
  if (cfg.thin && *cfg.thin < 1) throw DomainError("thin must be >= 1");
  if (cfg.shape && (!cfg.shape->g || !cfg.shape->g_prime)) {
    throw DomainError("a custom noise shape needs g and g'");
  }
  if (samples_per_path(cfg) < 1) throw DomainError("n_steps < thin retains nothing");
}

std::uint64_t effective_burn_in(const SdeConfig& cfg) {
  return cfg.burn_in ? *cfg.burn_in : 10 * ceil_inverse(cfg.tau, cfg.dt);
}

std::uint64_t effective_thin(const SdeConfig& cfg) {
  return cfg.thin ? *cfg.thin : ceil_inverse(cfg.tau, cfg.dt);
}

std::uint64_t samples_per_path(const SdeConfig& cfg) {
  return cfg.n_steps / std::max<std::uint64_t>(effective_thin(cfg), 1);
}

TheoryParams theoretical_params(const SdeConfig& cfg) {
  validate(cfg);
  return {cfg.multiplicative * cfg.multiplicative / (2.0 * cfg.tau),
          std::sqrt(cfg.additive * cfg.additive / (2.0 * cfg.tau))};
}

std::vector<double> simulate_path(const SdeConfig& cfg, std::uint64_t path) {
  validate(cfg);
  if (path >= cfg.n_paths) throw DomainError(fmt::format("path {} out of range", path));
  std::vector<double> out(samples_per_path(cfg));
  if (cfg.shape) {
    simulate_shaped_path(cfg, path, out.data());
  } else {
    simulate_identity_group(cfg, path, 1, out.data());
  }
  return out;
}

std::vector<double> simulate(const SdeConfig& cfg) {
  validate(cfg);
  const std::uint64_t keep = samples_per_path(cfg);
  std::vector<double> out(keep * cfg.n_paths);
  if (cfg.shape) {
    for (std::uint64_t p = 0; p < cfg.n_paths; ++p) simulate_shaped_path(cfg, p, &out[p * keep]);
    return out;
  }
  for (std::uint64_t p = 0; p < cfg.n_paths; p += kLanes) {
    const std::size_t lanes = static_cast<std::size_t>(std::min<std::uint64_t>(kLanes, cfg.n_paths - p));
    simulate_identity_group(cfg, p, lanes, &out[p * keep]);
  }
  return out;
}

double Histogram::density(std::size_t i) const {
  if (total == 0) return 0.0;
  return static_cast<double>(counts[i]) / (static_cast<double>(total) * width());
}

Histogram make_histogram(std::span<const double> samples, double lower, double upper,
                         std::size_t n_bins) {
  if (!(upper > lower) || n_bins < 1) throw DomainError("histogram needs lower < upper, bins >= 1");
  Histogram h{lower, upper, std::vector<std::uint64_t>(n_bins, 0), samples.size()};
  const double scale = static_cast<double>(n_bins) / (upper - lower);
  for (double x : samples) {
    if (!(x >= lower && x < upper)) continue;
    const auto j = std::min(static_cast<std::size_t>((x - lower) * scale), n_bins - 1);
    ++h.counts[j];
  }
  return h;
}

double expected_log_density_slope(const SdeConfig& cfg) {
  const double m2 = cfg.multiplicative * cfg.multiplicative;
  if (!(m2 > 0.0)) throw DomainError("the log-density slope needs M > 0");
  return -(2.0 * cfg.tau + m2) / (2.0 * m2);
}

SlopeFit stationary_log_density_slope(std::span<const double> samples, const SdeConfig& cfg,
                                      std::size_t n_bins) {
  validate(cfg);
  const double a = cfg.additive;
  const double m = cfg.multiplicative;
  if (!(m > 0.0)) throw DomainError("the log-density slope needs M > 0");
  if (samples.empty() || n_bins < 2) throw DegenerateError("no samples to fit");

  std::vector<double> mag(samples.size());
  std::transform(samples.begin(), samples.end(), mag.begin(), [](double v) { return std::abs(v); });
  const auto q = mag.begin() + static_cast<std::ptrdiff_t>(0.99 * static_cast<double>(mag.size() - 1));
  std::nth_element(mag.begin(), q, mag.end());
  const double t_max = std::asinh(m * *q / a);
  if (!(t_max > 0.0)) throw DegenerateError("samples have no spread");

  std::vector<std::uint64_t> counts(n_bins, 0);
  const double per_t = static_cast<double>(n_bins) / t_max;
  for (double v : samples) {
    const double t = std::asinh(m * std::abs(v) / a);
    if (t >= t_max) continue;
    ++counts[std::min(static_cast<std::size_t>(t * per_t), n_bins - 1)];
  }

  auto g = [&](double v) { return cfg.shape ? cfg.shape->g(v) : v; };
  const double n = static_cast<double>(samples.size());
  const double dt_bin = t_max / static_cast<double>(n_bins);
  std::vector<double> w, u, y;
  for (std::size_t j = 0; j < n_bins; ++j) {
    if (counts[j] == 0) continue;
    const double x0 = a / m * std::sinh(static_cast<double>(j) * dt_bin);
    const double x1 = a / m * std::sinh(static_cast<double>(j + 1) * dt_bin);
    const double xc = a / m * std::sinh((static_cast<double>(j) + 0.5) * dt_bin);
    const double c = static_cast<double>(counts[j]);
    const double gx = g(xc);
    w.push_back(c);
    u.push_back(std::log(a * a + m * m * gx * gx));
    y.push_back(std::log(c / (n * 2.0 * (x1 - x0))));
  }
  if (w.size() < 50) {
    throw DegenerateError(fmt::format("only {} occupied bins (need 50)", w.size()));
  }

  double sw = 0.0, su = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sw += w[i];
    su += w[i] * u[i];
    sy += w[i] * y[i];
  }
  const double ub = su / sw, yb = sy / sw;
  double suu = 0.0, suy = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    suu += w[i] * (u[i] - ub) * (u[i] - ub);
    suy += w[i] * (u[i] - ub) * (y[i] - yb);
  }
  SlopeFit fit;
  fit.slope = suy / suu;
  fit.intercept = yb - fit.slope * ub;
  fit.occupied_bins = w.size();
  double rss = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * u[i];
    rss += w[i] * r * r;
  }
  fit.stderr_slope = std::sqrt(rss / static_cast<double>(w.size() - 2) / suu);
  return fit;
}

}  // namespace coupled
