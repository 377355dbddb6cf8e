#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kksketch/matrix.hpp"
#include "kksketch/measures.hpp"
#include "kksketch/norms.hpp"
#include "kksketch/parallel.hpp"
#include "kksketch/sketch.hpp"

namespace kksketch {

/// Raised for malformed or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------- parameter plan

/// The proof's existential constants, exposed as configuration.
struct PlanConstants {
  double c_bernstein = 0.125;  // Bernstein psi_1 constant c
  double b_psi1 = 1.0;         // psi_1 bound b
  double c2 = 0.1;             // t = (c2 delta)^{2/delta}
  double c3 = 0.1;             // c(delta) = (c3 delta)^{1 + 2/delta}
  double c_prime = 0.01;       // target failure probability e^{-c' n}
  double c_b = 2.0;            // small-ball scaling constant, c1 = (2/3) c_b
};

struct ParameterPlan {
  double delta = 0.0;
  std::size_t n = 0;
  std::size_t N = 0;
  double beta = 0.0;        // delta / (2 (1 + delta))
  double t_latala = 0.0;    // (c2 delta)^{2/delta}
  double gamma = 0.0;       // 1 / (1 + c4)
  double c4 = 0.0;
  double c1 = 0.0;          // (2/3) c_b
  double C_upper = 0.0;     // 12 max(b/sqrt(c), b/c) + 2
  double t_upper_net = 0.0; // 6 max(b/sqrt(c), b/c) + 1
  double theta = 0.0;       // beta t gamma / (2 C)
  double c_delta = 0.0;     // (c3 delta)^{1 + 2/delta}
  double c_chain = 0.0;     // beta t gamma - theta C
  PlanConstants constants;
  /// log(2^N (c1 t)^{(1+delta/2) n} (3/theta)^n) and log((1/2) e^{-c' n}).
  double log_failure_bound = 0.0;
  double log_failure_target = 0.0;
  bool failure_bound_satisfied = false;
  std::vector<std::string> warnings;
};

/// N = ceil((1 + delta) n), robust to representation error in (1 + delta) n.
std::size_t sketch_rows(double delta, std::size_t n);

/// Throws std::invalid_argument unless delta is finite and positive and
/// n >= 1. delta >= 1 is accepted with a warning.
ParameterPlan parameter_plan(double delta, std::size_t n, const PlanConstants& constants = {});

nlohmann::json to_json(const ParameterPlan& plan);

// ---------------------------------------------------------------- configuration

struct FrameSpec {
  enum class Kind { standard_basis, random, explicit_vectors };
  Kind kind = Kind::standard_basis;
  std::size_t ambient_dim = 0;  // 0: same as n
  std::uint64_t seed = 0;
  std::vector<Vector> vectors;
};

struct ReferenceSpec {
  enum class Mode { automatic, closed, mc };
  Mode mode = Mode::automatic;
  std::size_t mc_samples = 100000;
};

struct AdversarialSpec {
  bool enabled = false;
  std::size_t restarts = 2;
  std::size_t steps = 20;
};

struct ThresholdPair {
  double c_low = 0.0;
  double C_high = std::numeric_limits<double>::infinity();
};

struct ExperimentConfig {
  MeasureSpec measure{MeasureFamily::gaussian_iid, 1};
  NormOracle norm = NormOracle::lp(1, 1.0);
  FrameSpec frame;
  std::size_t n = 1;
  double delta = 0.5;
  std::size_t trials = 1;
  std::size_t probes = 32;
  AdversarialSpec adversarial;
  ReferenceSpec reference;
  std::uint64_t seed = 0;
  std::vector<ThresholdPair> thresholds{ThresholdPair{}};
  PlanConstants constants;
  std::string output;

  Frame build_frame() const;
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Top-level keys: measure, norm, frame, n, delta, trials, probes,
/// adversarial, reference, seed, plus optional thresholds, constants, output.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const MeasureSpec& measure);
nlohmann::json to_json(const NormOracle& norm);
MeasureSpec measure_from_json(const nlohmann::json& doc, std::size_t dim);
NormOracle norm_from_json(const nlohmann::json& doc, std::size_t dim);

// ---------------------------------------------------------------- reference norm

/// |||.||| used as the denominator of distortion ratios: the closed form,
/// a shared common-random-numbers MC sketch, or the exact sign average.
class ReferenceNorm {
 public:
  static ReferenceNorm closed(MeasureSpec measure, Frame frame);
  static ReferenceNorm monte_carlo(const MeasureSpec& measure, Frame frame, std::size_t samples,
                                   std::uint64_t seed);
  static ReferenceNorm rademacher(Frame frame, std::size_t mc_samples, std::uint64_t seed);

  double operator()(std::span<const double> x) const;
  const char* kind() const noexcept;

 private:
  enum class Kind { closed, mc, rademacher_exact, rademacher_mc };
  explicit ReferenceNorm(Kind kind, Frame frame) : kind_(kind), frame_(std::move(frame)) {}

  Kind kind_;
  Frame frame_;
  std::optional<MeasureSpec> measure_;
  std::optional<Sketch> sample_;
};

// ---------------------------------------------------------------- distortion

struct TrialRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double min_ratio = 0.0;
  Vector argmin;
  double max_ratio = 0.0;
  Vector argmax;
  double e1_ratio = 0.0;
  std::size_t evaluations = 0;
  bool degenerate = false;
};

/// One sketch, `probes` directions (e_1 first, then Gaussian directions),
/// plus the optional derivative-free search. Ratios are
/// empirical_norm(x) / reference(x); argmin/argmax are scaled to the
/// reference sphere.
TrialRecord run_distortion_trial(const ExperimentConfig& config, const ParameterPlan& plan,
                                 std::uint64_t trial_seed);

struct FailureCount {
  ThresholdPair thresholds;
  std::size_t failures = 0;
  double frequency = 0.0;
  double std_error = 0.0;
};

struct ExperimentReport {
  static constexpr int kSchemaVersion = 1;

  ExperimentConfig config;
  ParameterPlan plan;
  std::vector<TrialRecord> trials;
  std::vector<FailureCount> failures;
  std::vector<std::pair<double, double>> min_ratio_quantiles;  // (level, value)
  std::vector<std::pair<double, double>> max_ratio_quantiles;
  double mean_distortion = 0.0;  // mean of max_ratio / min_ratio
};

/// Trial i uses derive_seed(config.seed, i); trials run concurrently and are
/// aggregated in index order, so the report does not depend on exec.
ExperimentReport run_experiment(const ExperimentConfig& config, Execution exec = {});

nlohmann::json to_json(const ExperimentReport& report);
/// One row per trial.
void write_report_csv(std::ostream& out, const ExperimentReport& report);

// ---------------------------------------------------------------- Kahane / BLM

enum class AverageMode { exact, mc };

struct KahaneResult {
  double avg1 = 0.0;
  double avgp = 0.0;
  double ratio = 1.0;
  double std_error1 = 0.0;
  double std_errorp = 0.0;
};

/// Ave ||sum +-x_i v_i||, (Ave ||.||^p)^{1/p} and their ratio (>= 1). MC mode
/// uses the same sign draws for both averages.
KahaneResult kahane_ratio(const Frame& frame, std::span<const double> x, double p, AverageMode mode,
                          std::size_t budget, std::uint64_t seed, Execution exec = {});

struct BlmTrial {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  bool success = false;
};

struct BlmReport {
  std::size_t n = 0;
  std::size_t N = 0;
  double epsilon = 0.0;
  double C_eps = 0.0;
  bool exact_reference = true;
  std::vector<BlmTrial> trials;
  std::size_t successes = 0;
  double success_frequency = 0.0;
};

struct BlmOptions {
  std::size_t trials = 100;
  std::size_t probes = 50;
  std::uint64_t seed = 0;
  /// MC budget for the sign-average reference when n exceeds the exact limit.
  std::size_t reference_mc_samples = 100000;
};

/// Sign-vector sketches with N = ceil(C_eps n) rows; a trial succeeds when
/// every probe ratio lies in [1 - epsilon, 1 + epsilon].
BlmReport blm_experiment(const Frame& frame, double epsilon, double C_eps, const BlmOptions& options,
                         Execution exec = {});

nlohmann::json to_json(const BlmReport& report);

}  // namespace kksketch
