#include "kksketch/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kksketch {
namespace {

void require_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

// x ln x with 0 ln 0 = 0.
double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

// x ln(x / y) with 0 ln(0 / y) = 0.
double xlogxy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(x / y); }

}  // namespace

void ChernoffParams::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0, 1)");
  if (N == 0) throw std::invalid_argument("N must be positive");
}

double entropy_u(double beta) {
  require_unit_interval(beta, "beta");
  return xlogx(beta) + xlogx(1.0 - beta);
}

double chernoff_rate(double beta, double p) {
  require_unit_interval(beta, "beta");
  require_unit_interval(p, "p");
  if (beta == p) return 0.0;
  const double value = xlogxy(beta, p) + xlogxy(1.0 - beta, 1.0 - p);
  return std::max(0.0, value);
}

ChernoffTail chernoff_tail_bounds(const ChernoffParams& params) {
  params.validate();
  ChernoffTail out;
  if (params.beta == params.p) return out;
  const double exponent = -static_cast<double>(params.N) * chernoff_rate(params.beta, params.p);
  if (params.beta < params.p) {
    out.regime = ChernoffRegime::below;
    out.lower_success_prob_bound = -std::expm1(exponent);
  } else {
    out.regime = ChernoffRegime::above;
    out.upper_tail_bound = std::exp(exponent);
  }
  return out;
}

Factorization analyse_factorization(const ChernoffParams& params) {
  params.validate();
  const double n = static_cast<double>(params.N);
  const double b = params.beta;
  const double p = params.p;
  Factorization f;
  f.log_exact = b * n * std::log(p) + (1.0 - b) * n * std::log1p(-p) - n * entropy_u(b);
  f.log_direct = -n * chernoff_rate(b, p);
  f.log_upper = (1.0 - b) * n * std::log1p(-p) + n * std::numbers::ln2;
  f.exact = std::exp(f.log_exact);
  f.direct = std::exp(f.log_direct);
  f.upper = std::exp(f.log_upper);
  return f;
}

void PsiOneParams::validate() const {
  if (!(b > 0.0)) throw std::invalid_argument("psi_1 bound b must be positive");
  if (!(c_bernstein > 0.0)) throw std::invalid_argument("Bernstein constant c must be positive");
}

double bernstein_tail(double t, const PsiOneParams& params, std::size_t N) {
  params.validate();
  if (!(t > 0.0)) throw std::invalid_argument("bernstein_tail requires t > 0");
  const double r = t / params.b;
  return 2.0 * std::exp(-params.c_bernstein * static_cast<double>(N) * std::min(r, r * r));
}

double psi1_norm_estimate(std::span<const double> samples) {
  if (samples.size() < kPsi1MinSamples) {
    throw std::invalid_argument("psi1_norm_estimate needs at least 100 samples");
  }
  // Moments of |X| / M with M = max |X| keep q = 10 in range; the estimate
  // is then rescaled, so doubling the samples doubles the estimate exactly.
  double m = 0.0;
  for (double v : samples) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  double best = 0.0;
  for (int q = 1; q <= 10; ++q) {
    CompensatedSum s;
    for (double v : samples) s.add(std::pow(std::abs(v) / m, q));
    const double moment = s.value() / static_cast<double>(samples.size());
    best = std::max(best, std::pow(moment, 1.0 / q) / q);
  }
  return m * best;
}

double borell_tail(double t) {
  if (!(t > 1.0)) throw std::invalid_argument("borell_tail requires t > 1");
  return (2.0 / 3.0) * std::exp2(-(t + 1.0) / 2.0);
}

C4Constant c4_constant() {
  // int_1^inf 2^{-(t+1)/2} dt = 2^{-1} * 2 / ln 2 = 1 / ln 2.
  const double c4 = (2.0 / 3.0) / std::numbers::ln2;
  return {c4, 1.0 / (1.0 + c4)};
}

Proportion small_ball_estimate(const MeasureSpec& measure, const Frame& frame,
                               std::span<const double> x, double alpha, std::size_t samples,
                               std::uint64_t seed, Execution exec) {
  if (samples == 0) throw std::invalid_argument("small_ball_estimate needs samples");
  const auto values = combination_norm_samples(measure, frame, x, samples, seed, exec);
  return proportion_at_least(values, alpha);
}

double empirical_gamma_x(const MeasureSpec& measure, const Frame& frame, std::span<const double> x,
                         std::size_t samples, std::uint64_t seed, Execution exec) {
  if (samples == 0) throw std::invalid_argument("empirical_gamma_x needs samples");
  auto values = combination_norm_samples(measure, frame, x, samples, seed, exec);
  return empirical_quantile(values, 2.0 / 3.0);
}

BorellCheck borell_check(const MeasureSpec& measure, const Frame& frame, std::span<const double> x,
                         std::span<const double> t_values, std::size_t samples, std::uint64_t seed,
                         Execution exec) {
  if (samples < 2) throw std::invalid_argument("borell_check needs at least 2 samples");
  auto values = combination_norm_samples(measure, frame, x, samples, seed, exec);
  const std::size_t half = samples / 2;
  std::vector<double> calibration(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(half));
  std::span<const double> tail_sample(values.data() + half, values.size() - half);

  BorellCheck out;
  out.gamma_x = empirical_quantile(calibration, 2.0 / 3.0);
  for (double t : t_values) {
    BorellPoint point;
    point.t = t;
    point.bound = borell_tail(t);
    const double level = out.gamma_x * t;
    const auto hits = static_cast<std::size_t>(std::count_if(
        tail_sample.begin(), tail_sample.end(), [&](double v) { return v > level; }));
    const double frac = static_cast<double>(hits) / static_cast<double>(tail_sample.size());
    point.tail = {frac, std::sqrt(frac * (1.0 - frac) / static_cast<double>(tail_sample.size())),
                  tail_sample.size()};
    out.points.push_back(point);
  }
  return out;
}

LatalaResult latala_check(const MeasureSpec& measure, const Frame& frame, std::span<const double> x,
                          double gamma_level, std::span<const double> t_values,
                          std::size_t samples, std::uint64_t seed, Execution exec) {
  if (!(gamma_level > 0.0)) throw std::invalid_argument("latala_check: gamma_level must be positive");
  for (double t : t_values) {
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("latala_check: t values must lie in (0, 1]");
  }
  if (samples == 0) throw std::invalid_argument("latala_check needs samples");
  const auto values = combination_norm_samples(measure, frame, x, samples, seed, exec);

  // a in tC  <=>  a / t in C  <=>  ||sum a_i x_i v_i|| <= t * gamma_level.
  const auto count_at_most = [&](double level) {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [&](double v) { return v <= level; }));
  };
  const std::size_t in_c = count_at_most(gamma_level);
  LatalaResult out;
  out.mu_c = static_cast<double>(in_c) / static_cast<double>(samples);
  if (out.mu_c > 2.0 / 3.0) throw std::domain_error("latala_check: level too large (mu(C) > 2/3)");
  if (in_c == 0) throw std::domain_error("latala_check: level too small (mu(C) = 0)");

  for (double t : t_values) {
    const std::size_t in_tc = t == 1.0 ? in_c : count_at_most(t * gamma_level);
    const double ratio = static_cast<double>(in_tc) / (t * static_cast<double>(in_c));
    out.ratios.emplace_back(t, ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

}  // namespace kksketch
