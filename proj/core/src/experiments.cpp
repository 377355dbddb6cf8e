#include "kksketch/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "kksketch/random.hpp"
#include "kksketch/stats.hpp"

namespace kksketch {
namespace {

using nlohmann::json;

constexpr double kQuantileLevels[] = {0.05, 0.25, 0.5, 0.75, 0.95};

json finite_or_string(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void gaussian_direction(Rng& rng, Vector& v) {
  bool nonzero = false;
  while (!nonzero) {
    for (auto& c : v) {
      c = rng.normal();
      nonzero = nonzero || c != 0.0;
    }
  }
}

ReferenceNorm make_reference(const ExperimentConfig& config, const Frame& frame, std::uint64_t seed) {
  const Vector probe(frame.size(), 1.0);
  const bool closed_available = expectation_norm_closed(config.measure, frame, probe).has_value();
  switch (config.reference.mode) {
    case ReferenceSpec::Mode::closed:
      if (!closed_available) throw ConfigError("reference mode 'closed' has no closed form for this measure/frame/norm");
      return ReferenceNorm::closed(config.measure, frame);
    case ReferenceSpec::Mode::automatic:
      if (closed_available) return ReferenceNorm::closed(config.measure, frame);
      [[fallthrough]];
    case ReferenceSpec::Mode::mc:
      if (config.reference.mc_samples < 2) {
        throw std::runtime_error("reference norm unavailable in closed form and MC budget is 0");
      }
      return ReferenceNorm::monte_carlo(config.measure, frame, config.reference.mc_samples, seed);
  }
  throw std::logic_error("unreachable reference mode");
}

// Probe evaluation with bookkeeping of the extreme ratios.
struct RatioTracker {
  const Sketch& sketch;
  const ReferenceNorm& reference;
  std::size_t evaluations = 0;

  double operator()(std::span<const double> x) {
    ++evaluations;
    return empirical_norm(sketch, x) / reference(x);
  }
};

// Coordinate-wise perturbation with shrinking step; direction = +1 maximizes,
// -1 minimizes. Returns the improved point and its ratio.
std::pair<Vector, double> local_search(RatioTracker& ratio, Vector x, double value, double direction,
                                       std::size_t steps) {
  const std::size_t n = x.size();
  double step = 0.25;
  for (std::size_t s = 0; s < steps; ++s) {
    const double scale = lp_norm(x, 2.0) / std::sqrt(static_cast<double>(n));
    bool improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vector y = x;
        y[i] += sign * step * scale;
        if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) continue;
        const double r = ratio(y);
        if (direction * r > direction * value) {
          x = std::move(y);
          value = r;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {std::move(x), value};
}

Vector scaled_to_sphere(Vector x, const ReferenceNorm& reference) {
  const double r = reference(x);
  for (auto& v : x) v /= r;
  return x;
}

double quantile_of(std::vector<double> values, double level) {
  return empirical_quantile(values, level);
}

std::size_t rows_for_multiplier(double multiplier, std::size_t n) {
  return sketch_rows(multiplier - 1.0, n);
}

}  // namespace

// ---------------------------------------------------------------- ReferenceNorm

ReferenceNorm ReferenceNorm::closed(MeasureSpec measure, Frame frame) {
  const Vector probe(frame.size(), 1.0);
  if (!expectation_norm_closed(measure, frame, probe)) {
    throw std::invalid_argument("closed-form reference unavailable for this measure/frame/norm");
  }
  ReferenceNorm r(Kind::closed, std::move(frame));
  r.measure_ = std::move(measure);
  return r;
}

ReferenceNorm ReferenceNorm::monte_carlo(const MeasureSpec& measure, Frame frame, std::size_t samples,
                                         std::uint64_t seed) {
  ReferenceNorm r(Kind::mc, frame);
  r.measure_ = measure;
  r.sample_ = Sketch::draw(measure, std::move(frame), samples, seed);
  return r;
}

ReferenceNorm ReferenceNorm::rademacher(Frame frame, std::size_t mc_samples, std::uint64_t seed) {
  if (frame.size() <= kMaxExactRademacherDim) return ReferenceNorm(Kind::rademacher_exact, std::move(frame));
  ReferenceNorm r(Kind::rademacher_mc, frame);
  r.sample_ = Sketch::rademacher(std::move(frame), mc_samples, seed);
  return r;
}

double ReferenceNorm::operator()(std::span<const double> x) const {
  switch (kind_) {
    case Kind::closed: return expectation_norm_closed(*measure_, frame_, x)->value;
    case Kind::mc:
    case Kind::rademacher_mc: return empirical_norm(*sample_, x);
    case Kind::rademacher_exact: return rademacher_average_exact(frame_, x, 1.0);
  }
  return 0.0;
}

const char* ReferenceNorm::kind() const noexcept {
  switch (kind_) {
    case Kind::closed: return "closed";
    case Kind::mc: return "mc";
    case Kind::rademacher_exact: return "rademacher_exact";
    case Kind::rademacher_mc: return "rademacher_mc";
  }
  return "unknown";
}

// ---------------------------------------------------------------- distortion

TrialRecord run_distortion_trial(const ExperimentConfig& config, const ParameterPlan& plan,
                                 std::uint64_t trial_seed) {
  config.validate();
  if (plan.n != config.n) throw std::invalid_argument("plan dimension does not match config");
  const Frame frame = config.build_frame();
  const Sketch sketch = Sketch::draw(config.measure, frame, plan.N, derive_seed(trial_seed, 0));
  const ReferenceNorm reference = make_reference(config, frame, derive_seed(trial_seed, 2));
  RatioTracker ratio{sketch, reference};

  TrialRecord rec;
  rec.seed = trial_seed;
  rec.degenerate = sketch.degenerate();
  rec.min_ratio = std::numeric_limits<double>::infinity();
  rec.max_ratio = -std::numeric_limits<double>::infinity();

  Rng probe_rng(derive_seed(trial_seed, 1));
  Vector x(config.n, 0.0);
  for (std::size_t k = 0; k < config.probes; ++k) {
    if (k == 0) {
      x.assign(config.n, 0.0);
      x[0] = 1.0;
    } else {
      gaussian_direction(probe_rng, x);
    }
    const double r = ratio(x);
    if (k == 0) rec.e1_ratio = r;
    if (r < rec.min_ratio) {
      rec.min_ratio = r;
      rec.argmin = x;
    }
    if (r > rec.max_ratio) {
      rec.max_ratio = r;
      rec.argmax = x;
    }
  }

  if (config.adversarial.enabled) {
    Rng start_rng(derive_seed(trial_seed, 3));
    for (double direction : {-1.0, 1.0}) {
      const bool minimize = direction < 0.0;
      for (std::size_t s = 0; s < config.adversarial.restarts; ++s) {
        Vector start = minimize ? rec.argmin : rec.argmax;
        if (s > 0) gaussian_direction(start_rng, start);
        const double start_value = s == 0 ? (minimize ? rec.min_ratio : rec.max_ratio) : ratio(start);
        auto [point, value] = local_search(ratio, std::move(start), start_value, direction,
                                           config.adversarial.steps);
        if (minimize && value < rec.min_ratio) {
          rec.min_ratio = value;
          rec.argmin = std::move(point);
        } else if (!minimize && value > rec.max_ratio) {
          rec.max_ratio = value;
          rec.argmax = std::move(point);
        }
      }
    }
  }

  rec.argmin = scaled_to_sphere(std::move(rec.argmin), reference);
  rec.argmax = scaled_to_sphere(std::move(rec.argmax), reference);
  rec.evaluations = ratio.evaluations;
  return rec;
}

ExperimentReport run_experiment(const ExperimentConfig& config, Execution exec) {
  config.validate();
  ExperimentReport report;
  report.config = config;
  report.plan = parameter_plan(config.delta, config.n, config.constants);
  report.trials.resize(config.trials);
  parallel_for(config.trials, exec, [&](std::size_t i) {
    auto rec = run_distortion_trial(config, report.plan, derive_seed(config.seed, i));
    rec.index = i;
    report.trials[i] = std::move(rec);
  });

  std::vector<double> mins;
  std::vector<double> maxs;
  CompensatedSum distortion;
  for (const auto& t : report.trials) {
    mins.push_back(t.min_ratio);
    maxs.push_back(t.max_ratio);
    distortion.add(t.max_ratio / t.min_ratio);
  }
  report.mean_distortion = distortion.value() / static_cast<double>(report.trials.size());

  for (const auto& th : config.thresholds) {
    FailureCount fc;
    fc.thresholds = th;
    for (const auto& t : report.trials) {
      if (t.min_ratio < th.c_low || t.max_ratio > th.C_high) ++fc.failures;
    }
    const double trials = static_cast<double>(report.trials.size());
    fc.frequency = static_cast<double>(fc.failures) / trials;
    fc.std_error = std::sqrt(fc.frequency * (1.0 - fc.frequency) / trials);
    report.failures.push_back(fc);
  }

  report.min_ratio_quantiles.emplace_back(0.0, *std::min_element(mins.begin(), mins.end()));
  report.max_ratio_quantiles.emplace_back(0.0, *std::min_element(maxs.begin(), maxs.end()));
  for (double level : kQuantileLevels) {
    report.min_ratio_quantiles.emplace_back(level, quantile_of(mins, level));
    report.max_ratio_quantiles.emplace_back(level, quantile_of(maxs, level));
  }
  report.min_ratio_quantiles.emplace_back(1.0, *std::max_element(mins.begin(), mins.end()));
  report.max_ratio_quantiles.emplace_back(1.0, *std::max_element(maxs.begin(), maxs.end()));
  return report;
}

nlohmann::json to_json(const ExperimentReport& report) {
  json trials = json::array();
  for (const auto& t : report.trials) {
    trials.push_back({{"index", t.index},
                      {"seed", t.seed},
                      {"min_ratio", finite_or_string(t.min_ratio)},
                      {"argmin", t.argmin},
                      {"max_ratio", finite_or_string(t.max_ratio)},
                      {"argmax", t.argmax},
                      {"e1_ratio", finite_or_string(t.e1_ratio)},
                      {"evaluations", t.evaluations},
                      {"degenerate", t.degenerate}});
  }
  json failures = json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"c_low", finite_or_string(f.thresholds.c_low)},
                        {"C_high", finite_or_string(f.thresholds.C_high)},
                        {"failures", f.failures},
                        {"frequency", f.frequency},
                        {"std_error", f.std_error}});
  }
  auto quantiles = [](const std::vector<std::pair<double, double>>& qs) {
    json out = json::array();
    for (const auto& [level, value] : qs) out.push_back({{"level", level}, {"value", finite_or_string(value)}});
    return out;
  };
  return {{"schema_version", ExperimentReport::kSchemaVersion},
          {"config", to_json(report.config)},
          {"plan", to_json(report.plan)},
          {"seeds", {{"base", report.config.seed}, {"trial_seed_rule", "derive_seed(base, trial_index)"}}},
          {"trials", trials},
          {"aggregate",
           {{"failures", failures},
            {"min_ratio_quantiles", quantiles(report.min_ratio_quantiles)},
            {"max_ratio_quantiles", quantiles(report.max_ratio_quantiles)},
            {"mean_distortion", finite_or_string(report.mean_distortion)}}},
          {"notes",
           {"ratios are measured on a finite probe set (plus optional local search); "
            "they can under-estimate failures of the all-x event"}}};
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  out << "trial,seed,min_ratio,max_ratio,e1_ratio,distortion,evaluations,degenerate\n";
  out << std::setprecision(17);
  for (const auto& t : report.trials) {
    out << t.index << ',' << t.seed << ',' << t.min_ratio << ',' << t.max_ratio << ',' << t.e1_ratio
        << ',' << t.max_ratio / t.min_ratio << ',' << t.evaluations << ',' << (t.degenerate ? 1 : 0)
        << '\n';
  }
}

// ---------------------------------------------------------------- Kahane / BLM

KahaneResult kahane_ratio(const Frame& frame, std::span<const double> x, double p, AverageMode mode,
                          std::size_t budget, std::uint64_t seed, Execution exec) {
  const auto moments = mode == AverageMode::exact ? rademacher_moments_exact(frame, x, p)
                                                  : rademacher_moments_mc(frame, x, p, budget, seed, exec);
  KahaneResult out;
  out.avg1 = moments.avg1;
  out.avgp = moments.avgp;
  out.std_error1 = moments.std_error1;
  out.std_errorp = moments.std_errorp;
  if (out.avg1 == 0.0) return out;
  out.ratio = out.avgp / out.avg1;
  // Power-mean inequality on the same (empirical) sign distribution.
  if (out.ratio < 1.0 - 1e-12) throw std::logic_error("kahane_ratio: power-mean inequality violated");
  out.ratio = std::max(out.ratio, 1.0);
  return out;
}

BlmReport blm_experiment(const Frame& frame, double epsilon, double C_eps, const BlmOptions& options,
                         Execution exec) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("blm: epsilon must lie in (0, 1]");
  if (!(C_eps > 0.0) || !std::isfinite(C_eps)) throw std::invalid_argument("blm: C_eps must be positive");
  if (options.trials == 0 || options.probes == 0) throw std::invalid_argument("blm: trials and probes must be positive");
  BlmReport report;
  report.n = frame.size();
  report.N = std::max<std::size_t>(1, rows_for_multiplier(C_eps, report.n));
  report.epsilon = epsilon;
  report.C_eps = C_eps;
  report.exact_reference = report.n <= kMaxExactRademacherDim;
  report.trials.resize(options.trials);

  parallel_for(options.trials, exec, [&](std::size_t i) {
    const std::uint64_t trial_seed = derive_seed(options.seed, i);
    const Sketch sketch = Sketch::rademacher(frame, report.N, derive_seed(trial_seed, 0));
    const ReferenceNorm reference =
        ReferenceNorm::rademacher(frame, options.reference_mc_samples, derive_seed(trial_seed, 2));
    Rng probe_rng(derive_seed(trial_seed, 1));
    BlmTrial t;
    t.min_ratio = std::numeric_limits<double>::infinity();
    t.max_ratio = -std::numeric_limits<double>::infinity();
    Vector x(report.n, 0.0);
    for (std::size_t k = 0; k < options.probes; ++k) {
      if (k == 0) {
        x[0] = 1.0;
      } else {
        gaussian_direction(probe_rng, x);
      }
      const double r = empirical_norm(sketch, x) / reference(x);
      t.min_ratio = std::min(t.min_ratio, r);
      t.max_ratio = std::max(t.max_ratio, r);
    }
    t.success = t.min_ratio >= 1.0 - epsilon && t.max_ratio <= 1.0 + epsilon;
    report.trials[i] = t;
  });

  for (const auto& t : report.trials) report.successes += t.success ? 1 : 0;
  report.success_frequency = static_cast<double>(report.successes) / static_cast<double>(report.trials.size());
  return report;
}

nlohmann::json to_json(const BlmReport& report) {
  json trials = json::array();
  for (const auto& t : report.trials) {
    trials.push_back({{"min_ratio", t.min_ratio}, {"max_ratio", t.max_ratio}, {"success", t.success}});
  }
  return {{"schema_version", ExperimentReport::kSchemaVersion},
          {"n", report.n},
          {"N", report.N},
          {"epsilon", report.epsilon},
          {"C_eps", report.C_eps},
          {"reference", report.exact_reference ? "rademacher_exact" : "rademacher_mc"},
          {"successes", report.successes},
          {"success_frequency", report.success_frequency},
          {"trials", trials}};
}

}  // namespace kksketch
