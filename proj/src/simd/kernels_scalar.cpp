#include <cmath>

#include "kernels.hpp"

namespace coupled::simd::detail {

HeunConstants heun_constants(const HeunParams& p) {
  const double sq = std::sqrt(p.dt);
  return {-p.tau, p.dt, p.additive * sq, p.multiplicative * sq};
}

namespace {

void pow_scalar(const double* x, std::size_t n, double e, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = x[i] > 0.0 ? std::pow(x[i], e) : 0.0;
  }
}

// Operation order here is mirrored exactly by the AVX2 kernel.
void heun_scalar(double* x, std::size_t lanes, const double* za, const double* zm,
                 std::size_t steps, const HeunParams& p) {
  const HeunConstants c = heun_constants(p);
  for (std::size_t s = 0; s < steps; ++s) {
    const double* a_row = za + s * lanes;
    const double* m_row = zm + s * lanes;
    for (std::size_t l = 0; l < lanes; ++l) {
      const double xv = x[l];
      const double da = c.a_sqdt * a_row[l];
      const double dm = c.m_sqdt * m_row[l];
      const double fx = c.neg_tau * xv;
      const double xp = ((xv + fx * c.dt) + da) + xv * dm;
      const double fxp = c.neg_tau * xp;
      x[l] = ((xv + (0.5 * (fx + fxp)) * c.dt) + da) + (0.5 * (xv + xp)) * dm;
    }
  }
}

}  // namespace

const KernelTable kScalarKernels = {pow_scalar, heun_scalar};

}  // namespace coupled::simd::detail
