#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "kksketch/norms.hpp"
#include "kksketch/random.hpp"
#include "test_support.hpp"

using namespace kksketch;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<NormOracle> sample_norms(std::size_t n) {
  std::vector<Vector> facets;
  for (std::size_t i = 0; i < n; ++i) {
    Vector f(n, 0.0);
    f[i] = 1.0;
    f[(i + 1) % n] = 0.5;
    facets.push_back(f);
  }
  return {NormOracle::lp(n, 1.0), NormOracle::lp(n, 2.0), NormOracle::lp(n, 3.5), NormOracle::lp(n, kInf),
          NormOracle::weighted_lp(1.5, Vector(n, 0.7)), NormOracle::polytope_gauge(facets)};
}

}  // namespace

TEST_CASE("examples") {
  CHECK(NormOracle::lp(2, 2.0)(std::vector<double>{3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(NormOracle::lp(3, 1.0)(std::vector<double>{1.0, -1.0, 1.0}) == 3.0);
  const auto gauge = NormOracle::polytope_gauge({{1.0, 0.0}, {0.0, 1.0}});
  CHECK(gauge(std::vector<double>{0.2, -0.7}) == 0.7);
  CHECK(NormOracle::lp(2, kInf)(std::vector<double>{0.2, -0.7}) == 0.7);
}

TEST_CASE("standard-basis gauge agrees with l_inf") {
  Rng rng(3);
  const std::size_t n = 6;
  std::vector<Vector> facets(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) facets[i][i] = 1.0;
  const auto gauge = NormOracle::polytope_gauge(facets);
  const auto linf = NormOracle::lp(n, kInf);
  for (int k = 0; k < 100; ++k) {
    const auto x = testing::random_vector(rng, n);
    CHECK(std::abs(gauge(x) - linf(x)) <= 1e-15);
  }
}

TEST_CASE("norm axioms on random inputs") {
  Rng rng(5);
  const std::size_t n = 5;
  for (const auto& norm : sample_norms(n)) {
    CAPTURE(norm.describe());
    CHECK(norm(Vector(n, 0.0)) == 0.0);
    for (int k = 0; k < 500; ++k) {
      const auto x = testing::random_vector(rng, n);
      const auto y = testing::random_vector(rng, n);
      const double lambda = 3.0 * rng.normal();
      Vector scaled(n);
      Vector neg(n);
      Vector sum(n);
      for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = lambda * x[i];
        neg[i] = -x[i];
        sum[i] = x[i] + y[i];
      }
      const double nx = norm(x);
      CHECK(nx > 0.0);
      CHECK(std::abs(norm(scaled) - std::abs(lambda) * nx) <= 1e-12 * std::abs(lambda) * nx);
      CHECK(norm(sum) <= nx + norm(y) + 1e-12);
      CHECK(norm(neg) == nx);
    }
  }
}

TEST_CASE("l_p norms decrease in p") {
  Rng rng(9);
  const std::vector<double> ps{1.0, 1.5, 2.0, 3.0, 7.0, 40.0, kInf};
  for (int k = 0; k < 200; ++k) {
    const auto x = testing::random_vector(rng, 8);
    for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
      CHECK(lp_norm(x, ps[i + 1]) <= lp_norm(x, ps[i]) * (1.0 + 1e-14));
    }
  }
}

TEST_CASE("large p does not overflow") {
  const std::vector<double> x{1e200, 1e200};
  const double v = lp_norm(x, 4.0);
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(1e200 * std::pow(2.0, 0.25)));
  CHECK(lp_norm(std::vector<double>{1e-200, 2e-200}, 300.0) == doctest::Approx(2e-200));
}

TEST_CASE("weighted l_p scales coordinates") {
  const auto w = NormOracle::weighted_lp(2.0, {3.0, 4.0});
  CHECK(w(std::vector<double>{1.0, 1.0}) == doctest::Approx(5.0));
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(NormOracle::lp(3, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(NormOracle::lp(0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(NormOracle::weighted_lp(2.0, {1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(NormOracle::polytope_gauge({{1.0, 0.0}, {2.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(NormOracle::lp(3, 2.0)(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}
