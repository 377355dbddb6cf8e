#include "kksketch/nets.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace kksketch {
namespace {

double distance(const Metric& metric, std::span<const double> a, std::span<const double> b,
                Vector& scratch) {
  for (std::size_t i = 0; i < a.size(); ++i) scratch[i] = a[i] - b[i];
  return metric(scratch);
}

}  // namespace

Net greedy_net(const Metric& metric, const SphereSampler& sampler, double theta, std::uint64_t seed,
               GreedyNetOptions options) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("greedy_net: theta must lie in (0, 1)");
  if (options.max_points == 0) throw std::invalid_argument("greedy_net: max_points must be positive");
  Rng rng(seed);
  Net net;
  net.theta = theta;
  Vector scratch;
  std::size_t streak = 0;
  for (;;) {
    const std::size_t limit = std::max(options.streak_floor, options.streak_factor * net.points.size());
    if (!net.points.empty() && streak >= limit) break;
    Vector candidate = sampler(rng);
    ++net.candidates;
    scratch.resize(candidate.size());
    const bool separated = std::all_of(net.points.begin(), net.points.end(), [&](const Vector& y) {
      return distance(metric, candidate, y, scratch) >= theta;
    });
    if (!separated) {
      ++streak;
      continue;
    }
    if (net.points.size() == options.max_points) {
      net.truncated = true;
      break;
    }
    net.points.push_back(std::move(candidate));
    streak = 0;
  }
  return net;
}

Coverage covering_check(const Net& net, const Metric& metric, const SphereSampler& sampler,
                        std::size_t probes, std::uint64_t seed, Execution exec) {
  if (net.points.empty()) throw std::invalid_argument("covering_check: empty net");
  if (probes == 0) throw std::invalid_argument("covering_check: probes must be positive");
  std::vector<double> gaps(probes);
  parallel_for(probes, exec, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const Vector probe = sampler(rng);
    Vector scratch(probe.size());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : net.points) best = std::min(best, distance(metric, probe, y, scratch));
    gaps[i] = best;
  });
  Coverage out;
  std::size_t covered = 0;
  for (double g : gaps) {
    out.max_gap = std::max(out.max_gap, g);
    if (g <= net.theta) ++covered;
  }
  out.covered_fraction = static_cast<double>(covered) / static_cast<double>(probes);
  return out;
}

double min_separation(const Net& net, const Metric& metric) {
  double best = std::numeric_limits<double>::infinity();
  Vector scratch;
  for (std::size_t i = 0; i < net.points.size(); ++i) {
    scratch.resize(net.points[i].size());
    for (std::size_t j = i + 1; j < net.points.size(); ++j) {
      best = std::min(best, distance(metric, net.points[i], net.points[j], scratch));
    }
  }
  return best;
}

SphereSampler norm_sphere_sampler(NormOracle norm) {
  return [norm = std::move(norm)](Rng& rng) {
    Vector v(norm.dim());
    double len = 0.0;
    while (len == 0.0) {
      for (auto& c : v) c = rng.normal();
      len = norm(v);
    }
    for (auto& c : v) c /= len;
    return v;
  };
}

Metric norm_metric(NormOracle norm) {
  return [norm = std::move(norm)](std::span<const double> x) { return norm(x); };
}

Metric expectation_metric(const MeasureSpec& measure, const Frame& frame, std::size_t mc_samples,
                          std::uint64_t seed) {
  const Vector probe(frame.size(), 1.0);
  if (expectation_norm_closed(measure, frame, probe)) {
    return [measure, frame](std::span<const double> x) {
      return expectation_norm_closed(measure, frame, x)->value;
    };
  }
  // Common random numbers: every evaluation averages over the same draws,
  // so the MC metric is itself a norm.
  auto reference = std::make_shared<const Sketch>(Sketch::draw(measure, frame, mc_samples, seed));
  return [reference](std::span<const double> x) { return empirical_norm(*reference, x); };
}

SphereSampler expectation_sphere_sampler(const MeasureSpec& measure, const Frame& frame,
                                         std::size_t mc_samples, std::uint64_t seed) {
  auto metric = expectation_metric(measure, frame, mc_samples, seed);
  const std::size_t n = frame.size();
  return [metric = std::move(metric), n](Rng& rng) {
    Vector v(n);
    double len = 0.0;
    while (len == 0.0) {
      for (auto& c : v) c = rng.normal();
      len = metric(v);
    }
    for (auto& c : v) c /= len;
    return v;
  };
}

void write_net_csv(std::ostream& out, const Net& net) {
  const std::size_t dim = net.points.empty() ? 0 : net.points.front().size();
  nlohmann::json meta = {{"theta", net.theta},
                         {"points", net.points.size()},
                         {"dim", dim},
                         {"truncated", net.truncated}};
  out << "# " << meta.dump() << '\n';
  for (std::size_t i = 0; i < dim; ++i) out << (i ? "," : "") << 'x' << (i + 1);
  out << '\n';
  out << std::setprecision(17);
  for (const auto& p : net.points) {
    for (std::size_t i = 0; i < p.size(); ++i) out << (i ? "," : "") << p[i];
    out << '\n';
  }
}

}  // namespace kksketch
