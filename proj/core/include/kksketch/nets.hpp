#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "kksketch/matrix.hpp"
#include "kksketch/measures.hpp"
#include "kksketch/norms.hpp"
#include "kksketch/parallel.hpp"
#include "kksketch/random.hpp"
#include "kksketch/sketch.hpp"

namespace kksketch {

/// Norm used as the net metric: distance(x, y) = metric(x - y).
using Metric = std::function<double(std::span<const double>)>;
/// Produces a point on the unit sphere of the metric.
using SphereSampler = std::function<Vector(Rng&)>;

struct Net {
  std::vector<Vector> points;
  double theta = 0.0;
  /// Set when construction stopped at max_points rather than on the
  /// rejection streak.
  bool truncated = false;
  /// Candidates drawn during construction.
  std::size_t candidates = 0;
};

struct GreedyNetOptions {
  std::size_t max_points = 100000;
  /// Stop after streak_factor * |net| consecutive rejections (at least streak_floor).
  std::size_t streak_factor = 50;
  std::size_t streak_floor = 50;
};

/// Random greedy packing: candidates are admitted when at distance >= theta
/// from every admitted point. The result is theta-separated exactly and,
/// once the rejection streak is reached, an approximate theta-net.
Net greedy_net(const Metric& metric, const SphereSampler& sampler, double theta, std::uint64_t seed,
               GreedyNetOptions options = {});

struct Coverage {
  double max_gap = 0.0;
  double covered_fraction = 0.0;
};

/// Distance from `probes` fresh sphere points to their nearest net point.
/// Probe i is drawn from Rng(derive_seed(seed, i)).
Coverage covering_check(const Net& net, const Metric& metric, const SphereSampler& sampler,
                        std::size_t probes, std::uint64_t seed, Execution exec = {});

/// Smallest pairwise distance among net points (+inf for fewer than two points).
double min_separation(const Net& net, const Metric& metric);

/// Gaussian direction divided by its norm: a point on the unit sphere of `norm`.
SphereSampler norm_sphere_sampler(NormOracle norm);

Metric norm_metric(NormOracle norm);

/// |||.||| for (measure, frame): the closed form when available, otherwise a
/// fixed common-random-numbers MC estimate with `mc_samples` draws.
Metric expectation_metric(const MeasureSpec& measure, const Frame& frame, std::size_t mc_samples,
                          std::uint64_t seed);

/// Points on the |||.|||-sphere via sphere_normalize of Gaussian directions.
SphereSampler expectation_sphere_sampler(const MeasureSpec& measure, const Frame& frame,
                                         std::size_t mc_samples, std::uint64_t seed);

/// CSV: a "# {json}" metadata comment, a header x1..xn, then one row per point.
void write_net_csv(std::ostream& out, const Net& net);

}  // namespace kksketch
