#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "coupled/compensated_sum.hpp"
#include "coupled/errors.hpp"
#include "kernels.hpp"

namespace coupled::simd {
namespace {

using detail::KernelTable;

bool cpu_has_avx2() {
#if defined(COUPLED_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* table_for(Backend b) {
#if defined(COUPLED_HAVE_AVX2)
  if (b == Backend::kAvx2) return &detail::kAvx2Kernels;
#endif
  (void)b;
  return &detail::kScalarKernels;
}

Backend initial_backend() {
  const char* env = std::getenv("COUPLED_SIMD");
  const std::string choice = env ? env : "auto";
  if (choice == "scalar") return Backend::kScalar;
  return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

const KernelTable& kernels() { return *table_for(current().load(std::memory_order_relaxed)); }

constexpr std::size_t kChunk = 1024;

}  // namespace

Backend active_backend() { return current().load(); }

bool backend_available(Backend b) { return b == Backend::kScalar || cpu_has_avx2(); }

void set_backend(Backend b) {
  if (!backend_available(b)) {
    throw UnsupportedError(fmt::format("SIMD backend {} is not available", backend_name(b)));
  }
  current().store(b);
}

std::string_view backend_name(Backend b) {
  return b == Backend::kAvx2 ? "avx2" : "scalar";
}

void pow_batch(std::span<const double> x, double e, std::span<double> out) {
  if (out.size() < x.size()) throw DomainError("pow_batch output is too short");
  kernels().pow_batch(x.data(), x.size(), e, out.data());
}

double power_sum(std::span<const double> x, double q) {
  double buf[kChunk];
  CompensatedSum sum;
  const KernelTable& k = kernels();
  for (std::size_t i = 0; i < x.size(); i += kChunk) {
    const std::size_t n = std::min(kChunk, x.size() - i);
    k.pow_batch(x.data() + i, n, q, buf);
    for (std::size_t j = 0; j < n; ++j) sum += buf[j];
  }
  return sum.value();
}

EscortMoments escort_moments(std::span<const double> p, std::span<const double> v, double q) {
  if (p.size() != v.size()) throw DomainError("escort_moments: length mismatch");
  double buf[kChunk];
  CompensatedSum w, s1, s2;
  const KernelTable& k = kernels();
  for (std::size_t i = 0; i < p.size(); i += kChunk) {
    const std::size_t n = std::min(kChunk, p.size() - i);
    k.pow_batch(p.data() + i, n, q, buf);
    for (std::size_t j = 0; j < n; ++j) {
      const double wv = buf[j];
      if (wv == 0.0) continue;
      const double x = v[i + j];
      w += wv;
      s1 += wv * x;
      s2 += wv * x * x;
    }
  }
  return {w.value(), s1.value(), s2.value()};
}

void heun_identity_block(std::span<double> x, std::span<const double> za,
                         std::span<const double> zm, std::size_t steps, const HeunParams& p) {
  const std::size_t need = steps * x.size();
  if (za.size() < need || zm.size() < need) {
    throw DomainError("heun_identity_block: noise buffers are too short");
  }
  kernels().heun_block(x.data(), x.size(), za.data(), zm.data(), steps, p);
}

}  // namespace coupled::simd
