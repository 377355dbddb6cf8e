// Command-line front end for the kksketch library.
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kksketch/bounds.hpp"
#include "kksketch/experiments.hpp"
#include "kksketch/nets.hpp"
#include "kksketch/sketch_io.hpp"

using namespace kksketch;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App& cmd, Common& common, bool needs_config) {
  auto* config = cmd.add_option("--config", common.config_path, "experiment config (JSON)");
  if (needs_config) config->required()->check(CLI::ExistingFile);
  cmd.add_option("--seed", common.seed, "override the config seed");
  cmd.add_option("--threads", common.threads, "worker threads (0 = hardware concurrency)");
  cmd.add_option("--out", common.out, "output path (default: stdout)");
  cmd.add_option("--format", common.format, "output format")->check(CLI::IsMember({"json", "csv"}));
}

ExperimentConfig load(const Common& common) {
  auto config = load_config(common.config_path);
  if (common.seed) config.seed = *common.seed;
  return config;
}

std::uint64_t seed_or(const Common& common, std::uint64_t fallback) { return common.seed.value_or(fallback); }

// Writes `text` to --out or stdout.
void emit(const Common& common, const std::string& text) {
  if (common.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(common.out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file '" + common.out + "'");
  file << text;
  if (!file) throw std::runtime_error("failed writing '" + common.out + "'");
}

void emit_json(const Common& common, const json& doc) { emit(common, doc.dump(2) + "\n"); }

void require_json(const Common& common, const char* command) {
  if (common.format != "json") throw ConfigError(std::string(command) + " only supports --format json");
}

// ---------------------------------------------------------------- subcommands

struct PlanArgs {
  std::optional<double> delta;
  std::optional<std::size_t> n;
};

void run_plan(const Common& common, const PlanArgs& args) {
  require_json(common, "plan");
  double delta = 0.0;
  std::size_t n = 0;
  PlanConstants constants;
  if (!common.config_path.empty()) {
    const auto config = load(common);
    delta = config.delta;
    n = config.n;
    constants = config.constants;
  }
  if (args.delta) delta = *args.delta;
  if (args.n) n = *args.n;
  if (n == 0 || !(delta > 0.0)) throw ConfigError("plan needs --config or both --delta and --n");
  emit_json(common, to_json(parameter_plan(delta, n, constants)));
}

void run_distortion(const Common& common) {
  const auto config = load(common);
  const auto report = run_experiment(config, Execution{common.threads});
  if (common.format == "csv") {
    std::ostringstream out;
    write_report_csv(out, report);
    emit(common, out.str());
  } else {
    emit_json(common, to_json(report));
  }
}

struct KahaneArgs {
  std::vector<double> p{1.0, 2.0, 4.0, 8.0};
  std::size_t vectors = 20;
  std::string mode = "auto";
  std::size_t budget = 100000;
};

void run_kahane(const Common& common, const KahaneArgs& args) {
  require_json(common, "kahane");
  const auto config = load(common);
  const Frame frame = config.build_frame();
  const bool exact = args.mode == "exact" || (args.mode == "auto" && config.n <= kMaxExactRademacherDim);
  if (exact && config.n > kMaxExactRademacherDim) {
    throw ConfigError("exact enumeration needs n <= " + std::to_string(kMaxExactRademacherDim));
  }
  Rng rng(derive_seed(config.seed, 0));
  json rows = json::array();
  for (std::size_t k = 0; k < args.vectors; ++k) {
    Vector x(config.n);
    for (auto& v : x) v = rng.normal();
    json ratios = json::array();
    for (double p : args.p) {
      const auto r = kahane_ratio(frame, x, p, exact ? AverageMode::exact : AverageMode::mc, args.budget,
                                  derive_seed(config.seed, k + 1), Execution{common.threads});
      ratios.push_back({{"p", p},
                        {"avg1", r.avg1},
                        {"avgp", r.avgp},
                        {"ratio", r.ratio},
                        {"std_error1", r.std_error1},
                        {"std_errorp", r.std_errorp}});
    }
    rows.push_back({{"x", x}, {"ratios", ratios}});
  }
  emit_json(common, {{"schema_version", ExperimentReport::kSchemaVersion},
                     {"n", config.n},
                     {"mode", exact ? "exact" : "mc"},
                     {"seed", config.seed},
                     {"frame", to_json(config).at("frame")},
                     {"norm", to_json(config.norm)},
                     {"vectors", rows}});
}

struct BlmArgs {
  double epsilon = 0.3;
  double c_eps = 500.0;
  std::size_t trials = 100;
  std::size_t probes = 50;
};

void run_blm(const Common& common, const BlmArgs& args) {
  require_json(common, "blm");
  const auto config = load(common);
  BlmOptions options;
  options.trials = args.trials;
  options.probes = args.probes;
  options.seed = config.seed;
  options.reference_mc_samples = config.reference.mc_samples;
  auto doc = to_json(blm_experiment(config.build_frame(), args.epsilon, args.c_eps, options,
                                    Execution{common.threads}));
  doc["seed"] = config.seed;
  emit_json(common, doc);
}

struct BoundsArgs {
  double beta = 0.25;
  double p = 0.5;
  std::size_t N = 100;
  std::vector<double> t{1.5, 2.0, 3.0};
  PsiOneParams psi;
};

void run_bounds(const Common& common, const BoundsArgs& args) {
  require_json(common, "bounds");
  const ChernoffParams params{args.beta, args.p, args.N};
  const auto tail = chernoff_tail_bounds(params);
  const auto f = analyse_factorization(params);
  const auto c4 = c4_constant();
  json borell = json::array();
  json bernstein = json::array();
  for (double t : args.t) {
    if (t > 1.0) borell.push_back({{"t", t}, {"bound", borell_tail(t)}});
    bernstein.push_back({{"t", t}, {"bound", bernstein_tail(t, args.psi, args.N)}});
  }
  const char* regime = tail.regime == ChernoffRegime::below   ? "below"
                       : tail.regime == ChernoffRegime::above ? "above"
                                                              : "equal";
  emit_json(common, {{"chernoff",
                      {{"beta", args.beta},
                       {"p", args.p},
                       {"N", args.N},
                       {"rate", chernoff_rate(args.beta, args.p)},
                       {"regime", regime},
                       {"lower_success_prob_bound", tail.lower_success_prob_bound},
                       {"upper_tail_bound", tail.upper_tail_bound}}},
                     {"factorization",
                      {{"exact", f.exact},
                       {"direct", f.direct},
                       {"upper", f.upper},
                       {"log_exact", f.log_exact},
                       {"log_direct", f.log_direct},
                       {"log_upper", f.log_upper}}},
                     {"bernstein", {{"b", args.psi.b}, {"c", args.psi.c_bernstein}, {"tails", bernstein}}},
                     {"borell", borell},
                     {"c4", c4.c4},
                     {"gamma", c4.gamma}});
}

struct NetArgs {
  double theta = 0.5;
  std::string metric = "norm";
  std::size_t probes = 10000;
  std::size_t mc_samples = 20000;
  std::size_t max_points = 100000;
};

void run_net(const Common& common, const NetArgs& args) {
  const auto config = load(common);
  Metric metric;
  SphereSampler sampler;
  if (args.metric == "norm") {
    if (config.norm.dim() != config.n) {
      throw ConfigError("--metric norm needs the ambient dimension to equal n (standard_basis frame)");
    }
    metric = norm_metric(config.norm);
    sampler = norm_sphere_sampler(config.norm);
  } else {
    const Frame frame = config.build_frame();
    metric = expectation_metric(config.measure, frame, args.mc_samples, derive_seed(config.seed, 0));
    sampler = expectation_sphere_sampler(config.measure, frame, args.mc_samples, derive_seed(config.seed, 0));
  }
  GreedyNetOptions options;
  options.max_points = args.max_points;
  const auto net = greedy_net(metric, sampler, args.theta, derive_seed(config.seed, 1), options);
  if (common.format == "csv") {
    std::ostringstream out;
    write_net_csv(out, net);
    emit(common, out.str());
    return;
  }
  const auto coverage = covering_check(net, metric, sampler, args.probes, derive_seed(config.seed, 2),
                                       Execution{common.threads});
  const double separation = min_separation(net, metric);
  emit_json(common, {{"n", config.n},
                     {"theta", net.theta},
                     {"metric", args.metric},
                     {"seed", config.seed},
                     {"size", net.points.size()},
                     {"candidates", net.candidates},
                     {"truncated", net.truncated},
                     {"min_separation", std::isfinite(separation) ? json(separation) : json("inf")},
                     {"max_gap", coverage.max_gap},
                     {"covered_fraction", coverage.covered_fraction},
                     {"points", net.points}});
}

struct SketchArgs {
  std::optional<std::size_t> rows;
  bool rademacher = false;
};

void run_sketch(const Common& common, const SketchArgs& args) {
  const auto config = load(common);
  const std::size_t rows = args.rows.value_or(sketch_rows(config.delta, config.n));
  const Frame frame = config.build_frame();
  const auto sketch = args.rademacher ? Sketch::rademacher(frame, rows, config.seed)
                                      : Sketch::draw(config.measure, frame, rows, config.seed);
  if (common.format == "csv") {
    std::ostringstream out;
    write_sketch_csv(out, sketch);
    emit(common, out.str());
    return;
  }
  json coeffs = json::array();
  for (std::size_t r = 0; r < sketch.rows(); ++r) {
    const auto row = sketch.coeffs().row(r);
    coeffs.push_back(std::vector<double>(row.begin(), row.end()));
  }
  emit_json(common, {{"n", sketch.dim()},
                     {"N", sketch.rows()},
                     {"seed", sketch.seed()},
                     {"provenance", sketch.provenance()},
                     {"measure", sketch.measure() ? to_json(*sketch.measure()) : json(nullptr)},
                     {"coeffs", coeffs}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized sketches of expectation norms over log-concave measures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kksketch 0.1.0");

  Common common;

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "print the parameter chain for (delta, n)");
  add_common(*plan, common, false);
  plan->add_option("--delta", plan_args.delta, "oversampling parameter");
  plan->add_option("--n", plan_args.n, "dimension");

  auto* distortion = app.add_subcommand("distortion", "run repeated distortion trials");
  add_common(*distortion, common, true);

  KahaneArgs kahane_args;
  auto* kahane = app.add_subcommand("kahane", "L1/Lp sign-average ratios on random vectors");
  add_common(*kahane, common, true);
  kahane->add_option("--p", kahane_args.p, "exponents")->expected(1, -1);
  kahane->add_option("--vectors", kahane_args.vectors, "number of random x");
  kahane->add_option("--mode", kahane_args.mode)->check(CLI::IsMember({"auto", "exact", "mc"}));
  kahane->add_option("--budget", kahane_args.budget, "sign draws in mc mode");

  BlmArgs blm_args;
  auto* blm = app.add_subcommand("blm", "sign-vector sketch replication");
  add_common(*blm, common, true);
  blm->add_option("--epsilon", blm_args.epsilon);
  blm->add_option("--c-eps", blm_args.c_eps, "rows per dimension");
  blm->add_option("--trials", blm_args.trials);
  blm->add_option("--probes", blm_args.probes);

  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "evaluate Chernoff, Bernstein and Borell bounds");
  add_common(*bounds, common, false);
  bounds->add_option("--beta", bounds_args.beta);
  bounds->add_option("--p", bounds_args.p);
  bounds->add_option("--N", bounds_args.N);
  bounds->add_option("--t", bounds_args.t, "tail levels")->expected(1, -1);
  bounds->add_option("--psi1-b", bounds_args.psi.b);
  bounds->add_option("--bernstein-c", bounds_args.psi.c_bernstein);

  NetArgs net_args;
  auto* net = app.add_subcommand("net", "greedy theta-net on a unit sphere");
  add_common(*net, common, true);
  net->add_option("--theta", net_args.theta);
  net->add_option("--metric", net_args.metric)->check(CLI::IsMember({"norm", "expectation"}));
  net->add_option("--probes", net_args.probes, "covering-check probes");
  net->add_option("--mc-samples", net_args.mc_samples, "MC draws for the expectation metric");
  net->add_option("--max-points", net_args.max_points);

  SketchArgs sketch_args;
  auto* sketch = app.add_subcommand("sketch", "draw and export a sketch");
  add_common(*sketch, common, true);
  sketch->add_option("--rows", sketch_args.rows, "rows (default: ceil((1 + delta) n))");
  sketch->add_flag("--rademacher", sketch_args.rademacher, "uniform sign rows instead of the measure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    if (*plan) run_plan(common, plan_args);
    else if (*distortion) run_distortion(common);
    else if (*kahane) run_kahane(common, kahane_args);
    else if (*blm) run_blm(common, blm_args);
    else if (*bounds) run_bounds(common, bounds_args);
    else if (*net) run_net(common, net_args);
    else if (*sketch) run_sketch(common, sketch_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << "done in " << seconds << " s\n";
  return 0;
}
