#include <cmath>
#include <random>

#include "coupled/algebra.hpp"
#include "coupled/errors.hpp"
#include "doctest.h"

using namespace coupled;

TEST_CASE("coupled exp and log reference values") {
  CHECK(coupled_exp(1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(coupled_exp(-2.0, 0.5) == 0.0);
  CHECK(coupled_exp(0.0, 0.0) == 1.0);
  CHECK(coupled_exp(1.0, 0.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(coupled_log(2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(coupled_log(std::exp(1.0), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(coupled_log(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(coupled_log(-1.0, 0.5), DomainError);
}

TEST_CASE("clamp boundary is total") {
  CHECK(coupled_exp(-1.0, 1.0) == 0.0);
  CHECK(std::isinf(coupled_exp(2.0, -0.5)));
  CHECK(std::isinf(coupled_exp_power(-4.0, 0.5, -3.0)));
}

TEST_CASE("series branch is continuous at kappa = 0") {
  for (double x = -20.0; x <= 20.0; x += 0.25) {
    const double ex = std::exp(x);
    CHECK(std::abs(coupled_exp(x, 1e-9) - ex) <= 1e-6 * ex);
  }
  for (double x : {1e-3, 0.5, 1.0, 7.0, 1e5}) {
    CHECK(std::abs(coupled_log(x, 1e-12) - std::log(x)) <= 1e-9 * std::max(1.0, std::abs(std::log(x))));
  }
}

TEST_CASE("ln_k inverts exp_k") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> kd(-0.9, 10.0), xd(-5.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    const double k = kd(rng);
    const double x = xd(rng);
    if (!(1.0 + k * x > 1e-6)) continue;
    const double y = coupled_log(coupled_exp(x, k), k);
    CHECK(std::abs(y - x) <= 1e-12 * std::max(1.0, std::abs(x)));
  }
}

TEST_CASE("coupled sum and difference") {
  CHECK(coupled_sum(1.0, 1.0, 1.0) == 3.0);
  CHECK(coupled_sum(0.0, 5.0, 2.0) == 5.0);
  CHECK(coupled_diff(3.0, 1.0, 1.0) == 1.0);
  CHECK_THROWS_AS(coupled_diff(1.0, -1.0, 1.0), SingularityError);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.5, 3.0);
  for (int i = 0; i < 500; ++i) {
    const double x = u(rng), y = u(rng), k = u(rng) + 0.5;
    CHECK(coupled_sum(x, y, k) == coupled_sum(y, x, k));
    CHECK(coupled_diff(coupled_sum(x, y, k), y, k) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("log-power helpers") {
  CHECK(coupled_log_pow(4.0, 0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(coupled_log_pow(0.0, -1.0, -0.5) == doctest::Approx(2.0));
  CHECK(coupled_log_pow(0.0, 1.0, 1.0) == -1.0);
  CHECK_THROWS_AS(coupled_log_pow(0.0, -1.0, 0.5), DomainError);
  CHECK(coupled_log_from_log(std::log(3.0), 2.0) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("parameter conversions") {
  CHECK(q_of(CouplingContext(1.0, 1.0, 1)) == 1.5);
  CHECK(q_of(CouplingContext(0.5, 2.0, 1)) == doctest::Approx(1.0 + 2.0 / 3.0));
  CHECK(kappa_of_q(1.5) == 1.0);
  CHECK_THROWS_AS(kappa_of_q(2.0), SingularityError);
  CHECK(beta_q_of(2.0, 1.0) == 1.0);
  CHECK(sigma_of_beta_q(beta_q_of(3.0, 0.7), 0.7) == doctest::Approx(3.0));
  CHECK(risk_aversion(CouplingContext(1.0, 2.0, 1)) == 1.0);
  for (double k : {-0.9, -0.3, 0.0, 0.4, 2.0, 50.0}) {
    CHECK(kappa_of_q(q_of(CouplingContext(k))) == doctest::Approx(k).epsilon(1e-12));
  }
}

TEST_CASE("context validation") {
  CHECK_THROWS_AS(CouplingContext(-1.0), DomainError);
  CHECK_THROWS_AS(CouplingContext(0.5, 0.0), DomainError);
  CHECK_THROWS_AS(CouplingContext(0.5, 1.0, 0), DomainError);
  CHECK_THROWS_AS(CouplingContext(-0.5, 1.0, 2), SingularityError);
  CHECK_THROWS_AS(CouplingContext(-0.6, 1.0, 2).require_escort_range(), DomainError);
  CHECK_NOTHROW(CouplingContext(-0.4, 1.0, 2).require_escort_range());
}
