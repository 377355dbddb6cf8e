#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "kksketch/measures.hpp"
#include "kksketch/random.hpp"
#include "kksketch/stats.hpp"
#include "test_support.hpp"

using namespace kksketch;

namespace {

std::vector<MeasureSpec> all_families(std::size_t n) {
  return {MeasureSpec(MeasureFamily::gaussian_iid, n), MeasureSpec(MeasureFamily::exponential_symmetric_iid, n),
          MeasureSpec(MeasureFamily::uniform_cube, n), MeasureSpec(MeasureFamily::uniform_euclidean_ball, n),
          MeasureSpec::cube_as_polytope(n)};
}

}  // namespace

TEST_CASE("gaussian coordinate means vanish") {
  const auto batch = sample(MeasureSpec(MeasureFamily::gaussian_iid, 2), 100000, 11);
  for (std::size_t c = 0; c < 2; ++c) {
    RunningMoments m;
    for (std::size_t r = 0; r < batch.points.rows(); ++r) m.add(batch.points(r, c));
    CHECK(std::abs(m.mean()) < 4.0 / std::sqrt(1e5));
  }
}

TEST_CASE("uniform cube stays in its support") {
  const auto batch = sample(MeasureSpec(MeasureFamily::uniform_cube, 3), 10000, 5);
  for (double v : batch.points.data()) CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("Laplace first absolute moment") {
  // Oracle: E|Laplace(1)| = 1 by quadrature (tests/oracles/compute_oracles.py).
  const auto batch = sample(MeasureSpec(MeasureFamily::exponential_symmetric_iid, 1), 1000000, 3);
  RunningMoments m;
  for (double v : batch.points.data()) m.add(std::abs(v));
  CHECK(m.mean() == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("sampling is seed-deterministic for every family") {
  for (const auto& m : all_families(4)) {
    CAPTURE(to_string(m.family()));
    const auto a = sample(m, 257, 99);
    const auto b = sample(m, 257, 99);
    CHECK(a.points == b.points);
    const auto c = sample(m, 257, 100);
    CHECK_FALSE(a.points == c.points);
  }
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(MeasureSpec(MeasureFamily::gaussian_iid, 0), std::invalid_argument);
  CHECK_THROWS_AS(MeasureSpec(MeasureFamily::uniform_cube, 2, -1.0), std::invalid_argument);
  // Normals spanning only a line leave the body unbounded.
  CHECK_THROWS_AS(MeasureSpec::polytope({{1.0, 0.0}, {2.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(MeasureSpec::polytope({{1.0, 0.0}, {0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(sample(MeasureSpec(MeasureFamily::gaussian_iid, 2), 0, 1), std::invalid_argument);
  CHECK_NOTHROW(MeasureSpec::polytope({{1.0, 1.0}, {1.0, -1.0}}));
}

TEST_CASE("log densities") {
  const MeasureSpec g(MeasureFamily::gaussian_iid, 3);
  const std::vector<double> zero(3, 0.0);
  const std::vector<double> two{2.0, 0.0, 0.0};
  CHECK(log_density(g, two) - log_density(g, zero) == doctest::Approx(-2.0));

  const MeasureSpec cube(MeasureFamily::uniform_cube, 3);
  CHECK(log_density(cube, std::vector<double>{0.5, 0.5, 0.5}) == 0.0);
  CHECK(log_density(cube, std::vector<double>{1.5, 0.0, 0.0}) == -std::numeric_limits<double>::infinity());

  CHECK_THROWS_AS(log_density(g, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("midpoint log-concavity on Gaussian pairs") {
  const MeasureSpec g(MeasureFamily::gaussian_iid, 4);
  Rng rng(17);
  int violations = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto x = testing::random_vector(rng, 4, 2.0);
    const auto y = testing::random_vector(rng, 4, 2.0);
    std::vector<double> mid(4);
    for (int i = 0; i < 4; ++i) mid[i] = 0.5 * (x[i] + y[i]);
    if (log_density(g, mid) < 0.5 * log_density(g, x) + 0.5 * log_density(g, y) - 1e-9) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("log-concavity on random triples for every family") {
  Rng rng(23);
  for (const auto& m : all_families(3)) {
    CAPTURE(to_string(m.family()));
    int violations = 0;
    for (int k = 0; k < 10000; ++k) {
      const auto x = testing::random_vector(rng, 3, 0.7);
      const auto y = testing::random_vector(rng, 3, 0.7);
      const double lambda = rng.uniform01();
      std::vector<double> z(3);
      for (int i = 0; i < 3; ++i) z[i] = lambda * x[i] + (1.0 - lambda) * y[i];
      const double lx = log_density(m, x);
      const double ly = log_density(m, y);
      const double rhs = std::isinf(lx) || std::isinf(ly) ? -std::numeric_limits<double>::infinity()
                                                          : lambda * lx + (1.0 - lambda) * ly;
      if (log_density(m, z) < rhs - 1e-9) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("every family is symmetric about the origin") {
  const std::vector<double> functional{1.0, -2.0, 0.5};
  for (const auto& m : all_families(3)) {
    CAPTURE(to_string(m.family()));
    const auto batch = sample(m, 100000, 41);
    RunningMoments acc;
    for (std::size_t r = 0; r < batch.points.rows(); ++r) {
      const auto row = batch.points.row(r);
      acc.add(functional[0] * row[0] + functional[1] * row[1] + functional[2] * row[2]);
    }
    // Hit-and-run draws are correlated; thinning keeps the effective size
    // close enough that 5 naive standard errors remain a meaningful bound.
    CHECK(std::abs(acc.mean()) < 5.0 * acc.std_error());
  }
}

TEST_CASE("polytope and ball samples satisfy their constraints") {
  const auto poly = MeasureSpec::polytope({{1.0, 1.0, 0.0}, {1.0, -1.0, 0.0}, {0.0, 0.5, 2.0}}, 1.5);
  const auto batch = sample(poly, 5000, 8);
  for (std::size_t r = 0; r < batch.points.rows(); ++r) CHECK(in_support(poly, batch.points.row(r)));

  const MeasureSpec ball(MeasureFamily::uniform_euclidean_ball, 5, 2.0);
  const auto balls = sample(ball, 5000, 9);
  for (std::size_t r = 0; r < balls.points.rows(); ++r) CHECK(in_support(ball, balls.points.row(r)));
}

TEST_CASE("hit-and-run cube marginals match the direct cube sampler") {
  const std::size_t n = 3;
  const auto walk = sample(MeasureSpec::cube_as_polytope(n), 20000, 12);
  const auto direct = sample(MeasureSpec(MeasureFamily::uniform_cube, n), 20000, 13);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t r = 0; r < 20000; ++r) {
      a.push_back(walk.points(r, c));
      b.push_back(direct.points(r, c));
    }
    // Independent-sample 0.1% critical value is ~0.0195; allow for chain correlation.
    CHECK(ks_statistic(a, b) < 0.03);
  }
}

TEST_CASE("burn-in and thinning defaults scale with dimension") {
  const auto m = MeasureSpec::cube_as_polytope(7);
  CHECK(m.burn_in() == 70);
  CHECK(m.thinning() == 7);
  const auto custom = MeasureSpec::cube_as_polytope(7, 1.0, {5, 2});
  CHECK(custom.burn_in() == 5);
  CHECK(custom.thinning() == 2);
}

TEST_CASE("stream seeds are distinct") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}
