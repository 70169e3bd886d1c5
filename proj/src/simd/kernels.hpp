#pragma once

#include <cstddef>

#include "coupled/simd.hpp"

namespace coupled::simd::detail {

struct KernelTable {
  void (*pow_batch)(const double* x, std::size_t n, double e, double* out);
  void (*heun_block)(double* x, std::size_t lanes, const double* za, const double* zm,
                     std::size_t steps, const HeunParams& p);
};

extern const KernelTable kScalarKernels;
#if defined(COUPLED_HAVE_AVX2)
extern const KernelTable kAvx2Kernels;
#endif

// Coefficients shared by both Heun kernels so they round the same way.
struct HeunConstants {
  double neg_tau, dt, a_sqdt, m_sqdt;
};
HeunConstants heun_constants(const HeunParams& p);

}  // namespace coupled::simd::detail
