#include <immintrin.h>

#include <cstdint>

#include "kernels.hpp"

namespace coupled::simd::detail {
namespace {

// ln2 split so that k*kLn2Hi is exact for |k| < 2^11.
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kLog2e = 1.44269504088896338700e+00;

inline __m256d int_bits_to_double(__m256i v) {
  // Exact for 0 <= v < 2^52.
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(v, magic)),
                       _mm256_set1_pd(0x1.0p52));
}

inline __m256d pow2_int(__m256d n) {
  // n integral in [-1022, 1023].
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  return _mm256_castsi256_pd(_mm256_slli_epi64(n64, 52));
}

// x^e for positive finite x; see simd.hpp for the accuracy contract.
__m256d pow4(__m256d x, __m256d e) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d is_zero = _mm256_cmp_pd(x, zero, _CMP_EQ_OQ);
  x = _mm256_blendv_pd(x, one, is_zero);

  const __m256d tiny = _mm256_cmp_pd(x, _mm256_set1_pd(0x1.0p-1022), _CMP_LT_OQ);
  x = _mm256_blendv_pd(x, _mm256_mul_pd(x, _mm256_set1_pd(0x1.0p54)), tiny);
  __m256d k = _mm256_blendv_pd(zero, _mm256_set1_pd(-54.0), tiny);

  const __m256i bits = _mm256_castpd_si256(x);
  k = _mm256_add_pd(k, _mm256_sub_pd(int_bits_to_double(_mm256_srli_epi64(bits, 52)),
                                     _mm256_set1_pd(1023.0)));
  const __m256i mant = _mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
      _mm256_set1_epi64x(0x3FF0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant);
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  k = _mm256_add_pd(k, _mm256_and_pd(big, one));

  // log m = 2s + 2s * s^2 * (1/3 + s^2/5 + ...), s = (m-1)/(m+1), |s| < 0.172.
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d poly = _mm256_set1_pd(1.0 / 23.0);
  for (int j = 10; j >= 1; --j) {
    poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / (2 * j + 1)));
  }
  const __m256d two_s = _mm256_add_pd(s, s);
  const __m256d lm_lo = _mm256_mul_pd(_mm256_mul_pd(two_s, s2), poly);

  // y = e*(k ln2 + log m), carrying the rounding error of the large part.
  const __m256d big_part = _mm256_mul_pd(k, _mm256_set1_pd(kLn2Hi));
  const __m256d y1 = _mm256_mul_pd(e, big_part);
  const __m256d y1_err = _mm256_fmsub_pd(e, big_part, y1);
  const __m256d small = _mm256_add_pd(
      _mm256_fmadd_pd(k, _mm256_set1_pd(kLn2Lo), lm_lo), two_s);
  const __m256d rest = _mm256_fmadd_pd(e, small, y1_err);
  const __m256d y = _mm256_add_pd(y1, rest);

  __m256d n = _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(kLog2e)),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  n = _mm256_max_pd(_mm256_min_pd(n, _mm256_set1_pd(1100.0)), _mm256_set1_pd(-1100.0));
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Hi), y1);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Lo), r);
  r = _mm256_add_pd(r, rest);

  // e^r by Taylor to degree 13 on |r| <= ~0.35.
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  constexpr double kInvFact[13] = {1.0,
                                   1.0,
                                   1.0 / 2,
                                   1.0 / 6,
                                   1.0 / 24,
                                   1.0 / 120,
                                   1.0 / 720,
                                   1.0 / 5040,
                                   1.0 / 40320,
                                   1.0 / 362880,
                                   1.0 / 3628800,
                                   1.0 / 39916800,
                                   1.0 / 479001600};
  for (int j = 12; j >= 0; --j) {
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[j]));
  }

  const __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.5)));
  const __m256d n2 = _mm256_sub_pd(n, n1);
  __m256d result = _mm256_mul_pd(_mm256_mul_pd(p, pow2_int(n1)), pow2_int(n2));

  const __m256d under = _mm256_cmp_pd(y, _mm256_set1_pd(-746.0), _CMP_LT_OQ);
  const __m256d over = _mm256_cmp_pd(y, _mm256_set1_pd(710.0), _CMP_GT_OQ);
  result = _mm256_blendv_pd(result, zero, under);
  result = _mm256_blendv_pd(result, _mm256_set1_pd(__builtin_inf()), over);
  return _mm256_blendv_pd(result, zero, is_zero);
}

void pow_avx2(const double* x, std::size_t n, double e, double* out) {
  const __m256d ev = _mm256_set1_pd(e);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, pow4(_mm256_loadu_pd(x + i), ev));
  }
  if (i < n) {
    // Pad the tail so every element takes the vector path.
    alignas(32) double in[4] = {1.0, 1.0, 1.0, 1.0};
    alignas(32) double res[4];
    for (std::size_t j = 0; i + j < n; ++j) in[j] = x[i + j];
    _mm256_store_pd(res, pow4(_mm256_load_pd(in), ev));
    for (std::size_t j = 0; i + j < n; ++j) out[i + j] = res[j];
  }
}

void heun_avx2(double* x, std::size_t lanes, const double* za, const double* zm,
               std::size_t steps, const HeunParams& p) {
  const HeunConstants c = heun_constants(p);
  const __m256d neg_tau = _mm256_set1_pd(c.neg_tau);
  const __m256d dt = _mm256_set1_pd(c.dt);
  const __m256d a_sqdt = _mm256_set1_pd(c.a_sqdt);
  const __m256d m_sqdt = _mm256_set1_pd(c.m_sqdt);
  const __m256d half = _mm256_set1_pd(0.5);
  const std::size_t vec_lanes = lanes - lanes % 4;
  for (std::size_t l = 0; l < vec_lanes; l += 4) {
    __m256d xv = _mm256_loadu_pd(x + l);
    for (std::size_t s = 0; s < steps; ++s) {
      const __m256d da = _mm256_mul_pd(a_sqdt, _mm256_loadu_pd(za + s * lanes + l));
      const __m256d dm = _mm256_mul_pd(m_sqdt, _mm256_loadu_pd(zm + s * lanes + l));
      const __m256d fx = _mm256_mul_pd(neg_tau, xv);
      const __m256d xp = _mm256_add_pd(
          _mm256_add_pd(_mm256_add_pd(xv, _mm256_mul_pd(fx, dt)), da), _mm256_mul_pd(xv, dm));
      const __m256d fxp = _mm256_mul_pd(neg_tau, xp);
      const __m256d drift = _mm256_mul_pd(_mm256_mul_pd(half, _mm256_add_pd(fx, fxp)), dt);
      const __m256d noise = _mm256_mul_pd(_mm256_mul_pd(half, _mm256_add_pd(xv, xp)), dm);
      xv = _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(xv, drift), da), noise);
    }
    _mm256_storeu_pd(x + l, xv);
  }
  for (std::size_t l = vec_lanes; l < lanes; ++l) {
    double xv = x[l];
    for (std::size_t s = 0; s < steps; ++s) {
      const double da = c.a_sqdt * za[s * lanes + l];
      const double dm = c.m_sqdt * zm[s * lanes + l];
      const double fx = c.neg_tau * xv;
      const double xp = ((xv + fx * c.dt) + da) + xv * dm;
      const double fxp = c.neg_tau * xp;
      xv = ((xv + (0.5 * (fx + fxp)) * c.dt) + da) + (0.5 * (xv + xp)) * dm;
    }
    x[l] = xv;
  }
}

}  // namespace

const KernelTable kAvx2Kernels = {pow_avx2, heun_avx2};

}  // namespace coupled::simd::detail
