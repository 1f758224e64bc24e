#include <cmath>

#include "bql/error.hpp"
#include "bql/prior.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace bql;

TEST_CASE("linspace includes both endpoints") {
  const auto g = linspace(-1.0, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == -1.0);
  CHECK(g.back() == 1.0);
  CHECK(g[2] == doctest::Approx(0.0));
}

TEST_CASE("uniform_spacing rejects irregular grids") {
  CHECK(uniform_spacing({0.0, 0.5, 1.0}) == doctest::Approx(0.5));
  try {
    uniform_spacing({0.0, 0.4, 1.0});
    FAIL("expected NonUniformGrid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonUniformGrid);
  }
  CHECK_THROWS_AS(uniform_spacing({1.0}), Error);
}

TEST_CASE("uniform prior sits on cell midpoints with the discrete variance") {
  const auto p = DiscretePrior::uniform(0.0, 1.0, 4);
  CHECK(p.grid()[0] == doctest::Approx(0.125));
  CHECK(p.mean() == doctest::Approx(0.5));
  const double h = 0.25;
  CHECK(p.variance() == doctest::Approx(h * h * (16.0 - 1.0) / 12.0));
  double total = 0.0;
  for (double w : p.probabilities()) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.kind() == PriorKind::UniformInterval);
}

TEST_CASE("gaussian prior variance approaches sigma^2") {
  const auto p = DiscretePrior::gaussian(3.0, 2.0, 2001, 16.0);
  CHECK(p.mean() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(p.variance() == doctest::Approx(4.0).epsilon(1e-9));
  const auto c = p.centered_grid();
  double m = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) m += p.probability(j) * c[j];
  CHECK(std::abs(m) < 1e-10);
}

TEST_CASE("from_density renormalizes and rejects invalid input") {
  const auto p = DiscretePrior::from_density({0.0, 1.0, 2.0}, {1.0, 2.0, 1.0});
  CHECK(p.density(1) == doctest::Approx(0.5));
  CHECK(p.mean() == doctest::Approx(1.0));
  CHECK_THROWS_AS(DiscretePrior::from_density({0.0, 1.0}, {0.0, 0.0}), Error);
  CHECK_THROWS_AS(DiscretePrior::from_density({0.0, 1.0}, {1.0, -1.0}), Error);
  CHECK_THROWS_AS(DiscretePrior::from_density({0.0, 1.0, 2.0}, {1.0, 1.0}), Error);
}

TEST_CASE("property: random densities normalize to one and variance is nonnegative") {
  gen::Source src(42);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = src.index(2, 200);
    const double lo = src.uniform(-10.0, 10.0);
    const double hi = lo + src.uniform(0.1, 5.0);
    std::vector<double> d(n);
    for (auto& v : d) v = src.uniform(0.0, 3.0);
    const auto p = DiscretePrior::from_density(linspace(lo, hi, n), d);
    double total = 0.0;
    for (double w : p.probabilities()) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.variance() >= 0.0);
    CHECK(p.mean() >= lo - 1e-12);
    CHECK(p.mean() <= hi + 1e-12);
  }
}
