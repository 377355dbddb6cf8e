#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "kksketch/experiments.hpp"
#include "kksketch/stats.hpp"
#include "test_support.hpp"

using namespace kksketch;
using nlohmann::json;

namespace {

json base_config() {
  return json::parse(R"({
    "measure": {"family": "gaussian_iid"},
    "norm": {"kind": "lp", "p": 1},
    "frame": {"kind": "standard_basis"},
    "n": 10,
    "delta": 0.5,
    "trials": 6,
    "probes": 16,
    "seed": 42,
    "thresholds": [[0.2, 3], [0, "inf"]]
  })");
}

}  // namespace

TEST_CASE("parameter plan examples") {
  const auto at_one = parameter_plan(1.0, 10);
  CHECK(at_one.beta == 0.25);
  CHECK_FALSE(at_one.warnings.empty());

  PlanConstants k;
  k.c3 = 0.1;
  const auto half = parameter_plan(0.5, 10, k);
  CHECK(half.c_delta == doctest::Approx(3.125e-7).epsilon(1e-12));
  CHECK(half.N == 15);
  CHECK(half.C_upper == doctest::Approx(12.0 * 8.0 + 2.0));  // b/c = 8 > b/sqrt(c)
  CHECK(half.t_upper_net == doctest::Approx(6.0 * 8.0 + 1.0));

  CHECK_THROWS_AS(parameter_plan(0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(parameter_plan(-0.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(parameter_plan(0.5, 0), std::invalid_argument);
}

TEST_CASE("parameter plan identities on random deltas") {
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const double delta = rng.uniform(1e-3, 1.0);
    const auto plan = parameter_plan(delta, 50);
    CHECK(plan.beta == delta / (2.0 * (1.0 + delta)));
    CHECK(std::abs((1.0 + delta) * (1.0 - plan.beta) - (1.0 + delta / 2.0)) <= 1e-12);
    CHECK(plan.t_latala == doctest::Approx(std::pow(0.1 * delta, 2.0 / delta)).epsilon(1e-14));
    CHECK(plan.theta == doctest::Approx(plan.beta * plan.t_latala * plan.gamma / (2.0 * plan.C_upper)).epsilon(1e-14));
    CHECK(plan.c_chain == doctest::Approx(plan.beta * plan.t_latala * plan.gamma / 2.0).epsilon(1e-12));
    CHECK(plan.N == static_cast<std::size_t>(std::ceil((1.0 + delta) * 50.0 - 1e-9)));
  }
}

TEST_CASE("c(delta) increases with delta") {
  PlanConstants k;
  k.c3 = 0.5;
  double previous = 0.0;
  for (int i = 10; i < 200; ++i) {
    const double delta = i / 100.0;  // within (0, 1/c3), away from underflow
    const double c = parameter_plan(delta, 5, k).c_delta;
    CHECK(c > previous);
    previous = c;
  }
}

TEST_CASE("sketch row count is robust to rounding") {
  CHECK(sketch_rows(0.1, 10) == 11);
  CHECK(sketch_rows(0.5, 25) == 38);
  CHECK(sketch_rows(99.0, 50) == 5000);
  CHECK(sketch_rows(0.5, 1) == 2);
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(base_config());
  CHECK(cfg.n == 10);
  CHECK(cfg.thresholds.size() == 2);
  CHECK(std::isinf(cfg.thresholds[1].C_high));
  CHECK(cfg.measure.dim() == 10);
  // Echo then parse again.
  auto echoed = to_json(cfg);
  const auto again = parse_config(echoed);
  CHECK(to_json(again) == echoed);

  auto missing = base_config();
  missing.erase("delta");
  CHECK_THROWS_AS(parse_config(missing), ConfigError);

  auto unknown = base_config();
  unknown["nn"] = 3;
  CHECK_THROWS_AS(parse_config(unknown), ConfigError);

  auto family = base_config();
  family["measure"]["family"] = "cauchy";
  CHECK_THROWS_AS(parse_config(family), ConfigError);

  auto trials = base_config();
  trials["trials"] = 0;
  CHECK_THROWS_AS(parse_config(trials), ConfigError);

  auto unbounded = base_config();
  unbounded["measure"] = json::parse(R"({"family": "uniform_polytope", "facets": [[1,0,0,0,0,0,0,0,0,0]]})");
  CHECK_THROWS_AS(parse_config(unbounded), ConfigError);

  auto cube_poly = base_config();
  cube_poly["measure"] = json::parse(R"({"family": "uniform_polytope", "facets": "cube"})");
  CHECK(parse_config(cube_poly).measure.family() == MeasureFamily::uniform_polytope);

  auto linf = base_config();
  linf["norm"] = json::parse(R"({"kind": "lp", "p": "inf"})");
  CHECK(std::isinf(parse_config(linf).norm.p()));

  auto closed = base_config();
  closed["measure"]["family"] = "uniform_cube";
  closed["reference"] = json::parse(R"({"mode": "closed"})");
  const auto closed_cfg = parse_config(closed);
  CHECK_THROWS_AS(run_distortion_trial(closed_cfg, parameter_plan(0.5, 10), 1), ConfigError);
}

TEST_CASE("distortion trial basics") {
  const auto cfg = parse_config(base_config());
  const auto plan = parameter_plan(cfg.delta, cfg.n, cfg.constants);
  const auto a = run_distortion_trial(cfg, plan, 77);
  const auto b = run_distortion_trial(cfg, plan, 77);
  CHECK(a.min_ratio == b.min_ratio);
  CHECK(a.max_ratio == b.max_ratio);
  CHECK(a.argmin == b.argmin);
  CHECK(a.e1_ratio > 0.0);
  CHECK(a.min_ratio <= a.e1_ratio);
  CHECK(a.e1_ratio <= a.max_ratio);
  CHECK(a.evaluations == cfg.probes);

  // argmin/argmax lie on the reference sphere.
  const auto frame = cfg.build_frame();
  CHECK(expectation_norm_closed(cfg.measure, frame, a.argmin)->value == doctest::Approx(1.0));
}

TEST_CASE("large oversampling concentrates ratios") {
  auto doc = base_config();
  doc["delta"] = 99.0;  // N = 100 n
  const auto cfg = parse_config(doc);
  const auto plan = parameter_plan(cfg.delta, cfg.n, cfg.constants);
  int inside = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto t = run_distortion_trial(cfg, plan, s);
    if (t.min_ratio >= 0.9 && t.max_ratio <= 1.1) ++inside;
  }
  CHECK(inside >= 18);
}

TEST_CASE("adversarial search only widens the ratio range") {
  auto doc = base_config();
  doc["adversarial"] = json::parse(R"({"enabled": true, "restarts": 2, "steps": 8})");
  const auto with_search = parse_config(doc);
  const auto without = parse_config(base_config());
  const auto plan = parameter_plan(0.5, 10);
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto a = run_distortion_trial(with_search, plan, s);
    const auto b = run_distortion_trial(without, plan, s);
    CHECK(a.min_ratio <= b.min_ratio);
    CHECK(a.max_ratio >= b.max_ratio);
    CHECK(a.evaluations > b.evaluations);
  }
}

TEST_CASE("MC reference path") {
  auto doc = base_config();
  doc["measure"]["family"] = "uniform_cube";
  doc["norm"] = json::parse(R"({"kind": "lp", "p": 2})");
  doc["reference"] = json::parse(R"({"mode": "auto", "mc_samples": 5000})");
  doc["n"] = 4;
  const auto cfg = parse_config(doc);
  const auto t = run_distortion_trial(cfg, parameter_plan(cfg.delta, cfg.n), 3);
  CHECK(t.min_ratio > 0.0);
  CHECK(t.min_ratio <= t.max_ratio);
}

TEST_CASE("experiment aggregation and determinism") {
  const auto cfg = parse_config(base_config());
  const auto r1 = run_experiment(cfg, Execution{1});
  const auto r3 = run_experiment(cfg, Execution{3});
  CHECK(to_json(r1).dump(2) == to_json(r3).dump(2));
  REQUIRE(r1.failures.size() == 2);
  CHECK(r1.failures[1].failures == 0);  // (0, inf) is vacuous
  CHECK(r1.trials.size() == 6);
  for (const auto& t : r1.trials) CHECK(t.min_ratio <= t.max_ratio);
  const auto j = to_json(r1);
  CHECK(j.at("schema_version") == 1);
  CHECK(j.at("aggregate").at("failures")[1].at("C_high") == "inf");

  std::ostringstream csv;
  write_report_csv(csv, r1);
  CHECK(csv.str().rfind("trial,seed,min_ratio", 0) == 0);
}

TEST_CASE("Kahane ratios") {
  const std::size_t n = 10;
  const Frame ortho = Frame::standard_basis(n, NormOracle::lp(n, 2.0));
  const Vector flat(n, 1.0 / std::sqrt(static_cast<double>(n)));
  CHECK(kahane_ratio(ortho, flat, 1.0, AverageMode::exact, 0, 0).ratio == 1.0);
  // Every sign pattern has Euclidean norm 1 here, so the exact ratio is 1.
  const auto flat2 = kahane_ratio(ortho, flat, 2.0, AverageMode::exact, 0, 0);
  CHECK(flat2.ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(flat2.ratio <= 3.0 * std::sqrt(2.0));

  Rng rng(3);
  const Frame frame = Frame::random(n, NormOracle::lp(6, 1.0), 5);
  const auto x = testing::random_vector(rng, n);
  double previous = 0.0;
  for (double p : {1.0, 2.0, 4.0, 8.0}) {
    const auto r = kahane_ratio(frame, x, p, AverageMode::exact, 0, 0);
    CHECK(r.ratio >= previous);
    CHECK(r.ratio >= 1.0);
    previous = r.ratio;
    const auto mc = kahane_ratio(frame, x, p, AverageMode::mc, 20000, 9);
    CHECK(mc.ratio >= 1.0);
  }
  CHECK_THROWS_AS(kahane_ratio(Frame::standard_basis(23, NormOracle::lp(23, 2.0)), Vector(23, 1.0), 2.0,
                               AverageMode::exact, 0, 0),
                  std::invalid_argument);
}

TEST_CASE("BLM sign sketches") {
  const std::size_t n = 6;
  const Frame l2 = Frame::standard_basis(n, NormOracle::lp(n, 2.0));
  BlmOptions opts;
  opts.trials = 10;
  opts.probes = 10;
  opts.seed = 4;
  const auto big = blm_experiment(l2, 0.3, 200.0, opts);
  CHECK(big.N == 1200);
  CHECK(big.success_frequency >= 0.9);

  // epsilon = 1: the lower threshold 0 never binds.
  const auto loose = blm_experiment(l2, 1.0, 1.0, opts);
  for (const auto& t : loose.trials) CHECK(t.success == (t.max_ratio <= 2.0));

  // For l_p norms and the standard basis, sign flips of x leave every row
  // value unchanged, so the sign-sketch empirical norm is unconditional.
  const auto sketch = Sketch::rademacher(l2, 50, 3);
  Rng rng(8);
  for (int k = 0; k < 20; ++k) {
    const auto x = testing::random_vector(rng, n);
    Vector flipped = x;
    for (auto& v : flipped) v *= rng.sign();
    CHECK(empirical_norm(sketch, x) == empirical_norm(sketch, flipped));
  }
  CHECK_THROWS_AS(blm_experiment(l2, 0.0, 2.0, opts), std::invalid_argument);
}

TEST_CASE("BLM aggregate statistics are invariant to probe sign flips") {
  // General frame: flips change individual rows, but over matched seeds the
  // aggregate success counts of x and its flip agree within binomial noise.
  const std::size_t n = 5;
  const Frame frame = Frame::random(n, NormOracle::lp(4, 1.0), 11);
  Rng rng(12);
  const auto x = testing::random_vector(rng, n);
  Vector flipped = x;
  flipped[0] = -flipped[0];
  flipped[3] = -flipped[3];
  RunningMoments a;
  RunningMoments b;
  for (std::uint64_t s = 0; s < 400; ++s) {
    const auto sketch = Sketch::rademacher(frame, 20, s);
    a.add(empirical_norm(sketch, x));
    b.add(empirical_norm(sketch, flipped));
  }
  CHECK(std::abs(a.mean() - b.mean()) < 5.0 * std::hypot(a.std_error(), b.std_error()));
  CHECK(rademacher_average_exact(frame, x, 1.0) == doctest::Approx(rademacher_average_exact(frame, flipped, 1.0)));
}
