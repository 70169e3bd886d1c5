#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

// Stratonovich simulation of
//   dX = f(X) dt + A o dW_a + M g(X) o dW_m,   f = -tau g g',
// whose stationary density is (A^2 + M^2 g^2)^(-(2 tau + M^2)/(2 M^2)). With
// g(x) = x this is the coupled Gaussian with kappa = M^2/(2 tau) and
// sigma^2 = A^2/(2 tau).

namespace coupled {

/// Custom noise shape g with derivative g'. An empty Shape means g(x) = x,
/// which runs on the vectorized kernel.
struct NoiseShape {
  std::function<double(double)> g;
  std::function<double(double)> g_prime;
};

struct SdeConfig {
  double additive = 1.4142135623730951;        // A
  double multiplicative = 1.4142135623730951;  // M
  double tau = 1.0;
  std::optional<NoiseShape> shape;
  double dt = 1e-3;
  std::uint64_t n_steps = 100000;  // steps per path after burn-in
  std::uint64_t n_paths = 16;
  std::optional<std::uint64_t> burn_in;  // default 10 ceil(1/(tau dt))
  std::optional<std::uint64_t> thin;     // default ceil(1/(tau dt))
  std::uint64_t seed = 42;
};

struct TheoryParams {
  double kappa = 0.0;
  double sigma = 1.0;
};

/// DomainError unless A > 0, M >= 0, tau > 0, dt > 0, dt (tau + M^2) <= 0.1,
/// n_steps, n_paths, thin >= 1 and a custom shape has both functions.
void validate(const SdeConfig& cfg);

std::uint64_t effective_burn_in(const SdeConfig& cfg);
std::uint64_t effective_thin(const SdeConfig& cfg);

/// Retained states per path, n_steps / thin.
std::uint64_t samples_per_path(const SdeConfig& cfg);

/// kappa = M^2/(2 tau), sigma = sqrt(A^2/(2 tau)).
TheoryParams theoretical_params(const SdeConfig& cfg);

/// Heun path `path` started at 0: burn-in, then every thin-th state. Each path
/// draws from its own stream of `seed`. UnstableError if |x| > 1e12.
std::vector<double> simulate_path(const SdeConfig& cfg, std::uint64_t path);

/// Concatenation of all paths in index order. Bitwise equal to calling
/// simulate_path for each index.
std::vector<double> simulate(const SdeConfig& cfg);

/// Counts on uniform bins over [lower, upper]; out-of-range samples count
/// toward `total` only.
struct Histogram {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  double width() const { return (upper - lower) / static_cast<double>(counts.size()); }
  double center(std::size_t i) const { return lower + (static_cast<double>(i) + 0.5) * width(); }
  /// count / (total width).
  double density(std::size_t i) const;
};

Histogram make_histogram(std::span<const double> samples, double lower, double upper,
                         std::size_t n_bins);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::size_t occupied_bins = 0;
};

/// Weighted least squares of log density against log(A^2 + M^2 g(x)^2) on
/// bins in |x| spaced uniformly in asinh(M |x| / A) up to the 0.99 quantile
/// of |x|. Requires M > 0 and >= 50 occupied bins (else DegenerateError).
/// The expected slope is -(2 tau + M^2)/(2 M^2).
SlopeFit stationary_log_density_slope(std::span<const double> samples, const SdeConfig& cfg,
                                      std::size_t n_bins = 100);

double expected_log_density_slope(const SdeConfig& cfg);

}  // namespace coupled
