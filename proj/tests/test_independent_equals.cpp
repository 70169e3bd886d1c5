#include <cmath>
#include <random>
#include <vector>

#include "coupled/distributions.hpp"
#include "coupled/errors.hpp"
#include "coupled/independent_equals.hpp"
#include "coupled/quadrature.hpp"
#include "doctest.h"

using namespace coupled;

TEST_CASE("discrete distribution validation") {
  CHECK_NOTHROW(DiscreteDist({0.25, 0.75}));
  CHECK_THROWS_AS(DiscreteDist({0.5, 0.6}), DomainError);
  CHECK_THROWS_AS(DiscreteDist({-0.1, 1.1}), DomainError);
  CHECK_THROWS_AS(DiscreteDist({}), DomainError);
  CHECK_THROWS_AS(DiscreteDist::normalized({0.0, 0.0}), DegenerateError);
  CHECK(DiscreteDist::normalized({1.0, 3.0})[1] == 0.75);
}

TEST_CASE("escort reference values") {
  const auto u = escort_discrete(DiscreteDist({0.5, 0.5}), 2.0);
  CHECK(u[0] == doctest::Approx(0.5).epsilon(1e-15));
  const auto e = escort_discrete(DiscreteDist({0.8, 0.2}), 2.0);
  CHECK(e[0] == doctest::Approx(16.0 / 17.0).epsilon(1e-15));
  CHECK(e[1] == doctest::Approx(1.0 / 17.0).epsilon(1e-14));
  const DiscreteDist p({0.3, 0.7});
  const auto same = escort_discrete(p, 1.0);
  CHECK(same[0] == 0.3);
  CHECK(same[1] == 0.7);
}

TEST_CASE("escort properties") {
  std::mt19937_64 rng(17);
  std::gamma_distribution<double> g(0.7);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> w(1 + t % 40);
    for (auto& x : w) x = g(rng);
    w[0] += 1e-3;
    if (t % 3 == 0 && w.size() > 2) w[1] = 0.0;
    const DiscreteDist p = DiscreteDist::normalized(w);
    for (double q : {0.0, 0.3, 2.0, 5.0}) {
      const auto e = escort_discrete(p, q);
      double total = 0.0;
      for (double x : e.p()) total += x;
      CHECK(std::abs(total - 1.0) <= 1e-12);
      if (t % 3 == 0 && w.size() > 2) CHECK(e[1] == 0.0);
    }
  }
  for (std::size_t n : {1u, 3u, 7u, 64u}) {
    const DiscreteDist uni(std::vector<double>(n, 1.0 / n));
    for (double q : {0.0, 0.5, 3.0}) {
      const auto e = escort_discrete(uni, q);
      for (double x : e.p()) CHECK(x == doctest::Approx(1.0 / n).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS(escort_discrete(DiscreteDist({1.0}), -1.0), DomainError);
}

TEST_CASE("continuous escort of the coupled exponential") {
  for (auto [s, k] : {std::pair{3.0, 2.0}, std::pair{1.0, 0.5}, std::pair{2.0, 1.0}}) {
    const CoupledDistribution d = CoupledExponential{0, s, k};
    const double q = (1.0 + 2.0 * k) / (1.0 + k);
    const auto t = ie_power_transform(s, k);
    const DensityFunction esc = escort_density(d, q);
    for (double x : {0.0, 0.4, 1.0, 5.0, 40.0}) {
      CHECK(esc(x) == doctest::Approx(density(CoupledExponential{0, t.sigma, t.kappa}, x)).epsilon(1e-9));
    }
    CHECK(escort_normalizer(as_density(d), q) ==
          doctest::Approx(std::pow(s, -k / (1.0 + k)) / (1.0 + k)).epsilon(1e-9));
    // Generic evaluator path agrees with the cached one.
    CHECK(escort_density(as_density(d), q)(1.3) == doctest::Approx(esc(1.3)).epsilon(1e-12));
  }
  const DensityFunction base = as_density(CoupledGaussian{0, 1, 0.5});
  CHECK(escort_density(base, 1.0)(0.7) == base(0.7));
}

TEST_CASE("escort of a divergent power") {
  // p^q with q = 0.2 on a 1/x^2 tail is not integrable.
  const DensityFunction base = as_density(CoupledExponential{0, 1, 1});
  CHECK_THROWS_AS(escort_normalizer(base, 0.2), DivergenceError);
}

TEST_CASE("independent-equals moments") {
  for (double k : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    INFO("kappa=" << k);
    CHECK(std::abs(ie_moment(CoupledExponential{0, 3, k}, 1) - 3.0) <= 1e-6 * 3.0);
  }
  CHECK(ie_moment(CoupledGaussian{0, 2, 5}, 2) == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(ie_moment(CoupledGaussian{1.5, 0.7, 0.8}, 1) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(ie_exponent(1, 1.0) == 1.5);
  CHECK(ie_exponent(2, 1.0, 2) == doctest::Approx(1.0 + 2.0 / 3.0));
  CHECK_THROWS_AS(ie_exponent(0, 1.0), DomainError);
}

TEST_CASE("empirical independent-equals moments") {
  const CoupledDistribution gpd = CoupledExponential{0, 1, 2};
  const auto xs = sample(gpd, 100000, 5);
  const DensityFunction f = as_density(gpd);
  CHECK(std::abs(ie_moment_empirical(xs, f.pdf, 1, CouplingContext(2.0)) - 1.0) <= 0.05);

  const CoupledDistribution g = CoupledGaussian{0, 1, 1};
  const auto gs = sample(g, 100000, 6);
  const DensityFunction gf = as_density(g);
  CHECK(std::abs(ie_moment_empirical(gs, gf.pdf, 2, CouplingContext(1.0)) - ie_moment(g, 2)) <=
        0.05);

  std::vector<double> v = {1.0, 2.0, 6.0};
  CHECK(ie_moment_empirical(v, [](double) { return 0.3; }, 1, CouplingContext(0.0)) == 3.0);
  CHECK_THROWS_AS(ie_moment_empirical(v, [](double) { return 0.0; }, 1, CouplingContext(0.5)),
                  DegenerateError);
}

TEST_CASE("empirical moments converge") {
  const CoupledDistribution gpd = CoupledExponential{0, 2, 0.8};
  const DensityFunction f = as_density(gpd);
  const double truth = ie_moment(gpd, 1);
  double err_small = 0.0, err_large = 0.0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    err_small += std::abs(ie_moment_empirical(sample(gpd, 10000, seed), f.pdf, 1, CouplingContext(0.8)) - truth);
    err_large += std::abs(ie_moment_empirical(sample(gpd, 100000, seed + 100), f.pdf, 1, CouplingContext(0.8)) - truth);
  }
  CHECK(err_large < err_small);
}
