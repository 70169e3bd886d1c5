#include <cmath>
#include <random>
#include <vector>

#include "coupled/errors.hpp"
#include "coupled/simd.hpp"
#include "doctest.h"

using namespace coupled;
using simd::Backend;

namespace {

struct BackendGuard {
  Backend saved = simd::active_backend();
  ~BackendGuard() { simd::set_backend(saved); }
};

std::vector<double> probe_values() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lg(-320.0, 3.0);
  std::vector<double> v = {0.0, 1.0, 0.5, 1e-310, 4.9e-324, 2.0, 1e-300, 0.9999999};
  for (int i = 0; i < 4001; ++i) v.push_back(std::pow(10.0, lg(rng)));
  return v;
}

}  // namespace

TEST_CASE("scalar backend is always available") {
  CHECK(simd::backend_available(Backend::kScalar));
  BackendGuard g;
  simd::set_backend(Backend::kScalar);
  CHECK(simd::active_backend() == Backend::kScalar);
}

TEST_CASE("pow_batch backends agree") {
  if (!simd::backend_available(Backend::kAvx2)) return;
  BackendGuard g;
  const auto x = probe_values();
  for (double e : {0.0, 0.5, 1.0, 1.5, 2.0, -0.25, 0.75, 3.0, -1.5, 1e-3}) {
    std::vector<double> a(x.size()), b(x.size());
    simd::set_backend(Backend::kScalar);
    simd::pow_batch(x, e, a);
    simd::set_backend(Backend::kAvx2);
    simd::pow_batch(x, e, b);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) {
        CHECK(a[i] == 0.0);
        CHECK(b[i] == 0.0);
        continue;
      }
      if (a[i] == 0.0 || std::isinf(a[i])) {
        CHECK(b[i] == a[i]);
        continue;
      }
      const double tol = 8e-16 * std::max(1.0, std::abs(e * std::log(x[i])));
      // Subnormal results carry absolute, not relative, precision.
      const double floor = 1e-322;
      INFO("x=" << x[i] << " e=" << e);
      CHECK(std::abs(b[i] - a[i]) <= tol * std::abs(a[i]) + floor);
    }
  }
}

TEST_CASE("power sums ignore zeros") {
  std::vector<double> p = {0.2, 0.3, 0.5};
  std::vector<double> padded = {0.2, 0.0, 0.3, 0.0, 0.5, 0.0, 0.0};
  for (double q : {0.5, 1.5, 2.0}) {
    CHECK(simd::power_sum(p, q) == simd::power_sum(padded, q));
  }
  CHECK(simd::power_sum(p, 2.0) == doctest::Approx(0.38).epsilon(1e-14));
}

TEST_CASE("escort moments") {
  std::vector<double> p = {0.25, 0.75};
  std::vector<double> v = {1.0, 3.0};
  const auto m = simd::escort_moments(p, v, 2.0);
  CHECK(m.weight == doctest::Approx(0.625));
  CHECK(m.first == doctest::Approx(0.0625 + 3 * 0.5625));
  CHECK(m.second == doctest::Approx(0.0625 + 9 * 0.5625));
  CHECK_THROWS_AS(simd::escort_moments(p, std::vector<double>{1.0}, 2.0), DomainError);
}

TEST_CASE("Heun kernels are bitwise identical across backends") {
  if (!simd::backend_available(Backend::kAvx2)) return;
  BackendGuard g;
  const std::size_t lanes = 11, steps = 500;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01;
  std::vector<double> za(lanes * steps), zm(lanes * steps);
  for (auto& z : za) z = n01(rng);
  for (auto& z : zm) z = n01(rng);
  simd::HeunParams p{1.0, std::sqrt(2.0), std::sqrt(2.0), 1e-3};
  std::vector<double> xa(lanes, 0.3), xb(lanes, 0.3);
  simd::set_backend(Backend::kScalar);
  simd::heun_identity_block(xa, za, zm, steps, p);
  simd::set_backend(Backend::kAvx2);
  simd::heun_identity_block(xb, za, zm, steps, p);
  for (std::size_t l = 0; l < lanes; ++l) CHECK(xa[l] == xb[l]);
}

TEST_CASE("Heun step matches the hand-written scheme") {
  std::vector<double> x = {2.0};
  std::vector<double> za = {0.5}, zm = {-1.0};
  const double tau = 1.0, A = 0.3, M = 0.7, dt = 0.01, sq = std::sqrt(dt);
  simd::heun_identity_block(x, za, zm, 1, {tau, A, M, dt});
  const double x0 = 2.0;
  const double pred = x0 - tau * x0 * dt + A * sq * 0.5 + M * x0 * sq * -1.0;
  const double want =
      x0 + 0.5 * (-tau * x0 - tau * pred) * dt + A * sq * 0.5 + 0.5 * M * (x0 + pred) * sq * -1.0;
  CHECK(x[0] == doctest::Approx(want).epsilon(1e-14));
}
