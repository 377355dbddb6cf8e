#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kksketch/measures.hpp"
#include "kksketch/parallel.hpp"
#include "kksketch/sketch.hpp"
#include "kksketch/stats.hpp"

namespace kksketch {

// ---------------------------------------------------------------- Chernoff

struct ChernoffParams {
  double beta = 0.0;
  double p = 0.0;
  std::size_t N = 0;

  /// Throws unless 0 < beta < 1, 0 < p < 1 and N >= 1.
  void validate() const;
};

/// u(beta) = beta ln beta + (1 - beta) ln(1 - beta), extended by 0 at the endpoints.
double entropy_u(double beta);

/// I(beta, p) = beta ln(beta/p) + (1 - beta) ln((1 - beta)/(1 - p)), the
/// Bernoulli relative entropy; continuous at beta in {0, 1}.
double chernoff_rate(double beta, double p);

enum class ChernoffRegime { below, above, equal };

struct ChernoffTail {
  /// Lower bound on P{Z_1 + ... + Z_N >= beta N}.
  double lower_success_prob_bound = 0.0;
  /// Upper bound on the same probability.
  double upper_tail_bound = 1.0;
  ChernoffRegime regime = ChernoffRegime::equal;
};

/// beta < p: lower = 1 - exp(-N I). beta > p: upper = exp(-N I).
/// beta = p: the trivial pair (0, 1).
ChernoffTail chernoff_tail_bounds(const ChernoffParams& params);

/// exp(-N I(beta,p)) evaluated two ways, plus the coarser bound
/// (1-p)^{(1-beta) N} 2^N. Logs are kept so large N does not underflow.
struct Factorization {
  double exact = 0.0;        // via p^{beta N} (1-p)^{(1-beta) N} e^{-N u(beta)}
  double direct = 0.0;       // via exp(-N I)
  double upper = 0.0;
  double log_exact = 0.0;
  double log_direct = 0.0;
  double log_upper = 0.0;
};

Factorization analyse_factorization(const ChernoffParams& params);

// ---------------------------------------------------------------- Bernstein / psi_1

struct PsiOneParams {
  double b = 1.0;
  double c_bernstein = 0.125;

  void validate() const;
};

/// 2 exp(-c N min(t/b, t^2/b^2)).
double bernstein_tail(double t, const PsiOneParams& params, std::size_t N);

/// Moment-based psi_1 estimate max_{q=1..10} (mean |X|^q)^{1/q} / q.
/// Needs at least 100 samples. This is an estimator of the order of the
/// Orlicz norm, not the norm itself.
double psi1_norm_estimate(std::span<const double> samples);

inline constexpr std::size_t kPsi1MinSamples = 100;

// ---------------------------------------------------------------- Borell / small ball

/// (2/3) (1/2)^{(t+1)/2}, the Borell tail for a symmetric convex set of
/// measure 2/3 dilated by t > 1.
double borell_tail(double t);

struct C4Constant {
  double c4 = 0.0;     // (2/3) / ln 2
  double gamma = 0.0;  // 1 / (1 + c4)
};

C4Constant c4_constant();

/// Fraction of draws with ||sum a_i x_i v_i|| >= alpha, with binomial error.
Proportion small_ball_estimate(const MeasureSpec& measure, const Frame& frame,
                               std::span<const double> x, double alpha, std::size_t samples,
                               std::uint64_t seed, Execution exec = {});

/// Empirical 2/3-quantile of ||sum a_i x_i v_i||.
double empirical_gamma_x(const MeasureSpec& measure, const Frame& frame, std::span<const double> x,
                         std::size_t samples, std::uint64_t seed, Execution exec = {});

/// Empirical check of the Borell tail for A_x = {a : ||sum a_i x_i v_i|| <= gamma_x}.
struct BorellPoint {
  double t = 0.0;
  Proportion tail;     // mu(complement of t A_x)
  double bound = 0.0;  // borell_tail(t)
};

struct BorellCheck {
  double gamma_x = 0.0;
  std::vector<BorellPoint> points;
};

/// gamma_x is estimated on the first half of the draws and the tails on the
/// second half, so the set A_x is fixed independently of the tail sample.
BorellCheck borell_check(const MeasureSpec& measure, const Frame& frame, std::span<const double> x,
                         std::span<const double> t_values, std::size_t samples, std::uint64_t seed,
                         Execution exec = {});

// ---------------------------------------------------------------- Latala

struct LatalaResult {
  double mu_c = 0.0;  // empirical mu(C_x)
  std::vector<std::pair<double, double>> ratios;  // (t, mu(tC) / (t mu(C)))
  double max_ratio = 0.0;                         // empirical c_b
};

/// Ratios mu(tC_x) / (t mu(C_x)) for C_x = {a : ||sum a_i x_i v_i|| <= gamma_level}.
/// Throws std::domain_error when the empirical mu(C_x) exceeds 2/3 ("level
/// too large") or is zero.
LatalaResult latala_check(const MeasureSpec& measure, const Frame& frame, std::span<const double> x,
                          double gamma_level, std::span<const double> t_values,
                          std::size_t samples, std::uint64_t seed, Execution exec = {});

}  // namespace kksketch
