#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel kernels with a scalar reference and an AVX2 variant. The
// backend is picked once at startup (COUPLED_SIMD=scalar|avx2|auto) and can
// be switched by tests.

namespace coupled::simd {

enum class Backend { kScalar, kAvx2 };

Backend active_backend();
bool backend_available(Backend b);
/// Throws UnsupportedError when the CPU or build lacks `b`.
void set_backend(Backend b);
std::string_view backend_name(Backend b);

/// out[i] = x[i]^e for x[i] > 0 and 0 for x[i] == 0. Inputs must be finite
/// and non-negative. The AVX2 variant agrees with std::pow to a few ulp
/// relative to max(1, |e ln x|).
void pow_batch(std::span<const double> x, double e, std::span<double> out);

/// sum_i x[i]^q with the same zero convention, summed left to right with
/// compensation so that appending zeros never changes the result.
double power_sum(std::span<const double> x, double q);

struct EscortMoments {
  double weight = 0.0;  // sum p^q
  double first = 0.0;   // sum p^q v
  double second = 0.0;  // sum p^q v^2
};

/// Escort sums of probabilities p against values v.
EscortMoments escort_moments(std::span<const double> p, std::span<const double> v, double q);

/// One Stratonovich Heun block for dx = -tau x dt + A dW_a + M x o dW_m.
struct HeunParams {
  double tau = 1.0;
  double additive = 0.0;
  double multiplicative = 0.0;
  double dt = 1e-3;
};

/// Advances every lane of x by `steps` steps. za and zm hold standard
/// normals laid out step-major (steps x lanes). Both backends round
/// identically, so results are bitwise equal.
void heun_identity_block(std::span<double> x, std::span<const double> za,
                         std::span<const double> zm, std::size_t steps, const HeunParams& p);

}  // namespace coupled::simd
