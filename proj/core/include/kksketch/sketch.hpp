#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kksketch/matrix.hpp"
#include "kksketch/measures.hpp"
#include "kksketch/norms.hpp"
#include "kksketch/parallel.hpp"

namespace kksketch {

/// The unit vectors v_1..v_n in (R^m, ambient norm) that define
/// |||x||| = E ||sum a_i x_i v_i||. Vectors are rescaled to ambient norm 1
/// at construction.
class Frame {
 public:
  Frame(std::vector<Vector> vectors, NormOracle ambient);

  static Frame standard_basis(std::size_t n, NormOracle ambient);
  /// n Gaussian directions in R^m, normalized in the ambient norm.
  static Frame random(std::size_t n, NormOracle ambient, std::uint64_t seed);

  std::size_t size() const noexcept { return vectors_.size(); }
  std::size_t ambient_dim() const noexcept { return ambient_.dim(); }
  const Vector& vector(std::size_t i) const { return vectors_.at(i); }
  const std::vector<Vector>& vectors() const noexcept { return vectors_; }
  const NormOracle& ambient_norm() const noexcept { return ambient_; }
  bool is_standard_basis() const noexcept { return standard_basis_; }

  /// out = sum_i a_i x_i v_i; `out` must have ambient_dim() entries.
  void combine(std::span<const double> a, std::span<const double> x, std::span<double> out) const;

  /// ||sum_i a_i x_i v_i|| using `scratch` (ambient_dim() entries) as workspace.
  double combination_norm(std::span<const double> a, std::span<const double> x,
                          std::span<double> scratch) const;

 private:
  std::vector<Vector> vectors_;
  NormOracle ambient_;
  bool standard_basis_ = false;
};

Vector weighted_sum(const Frame& frame, std::span<const double> a, std::span<const double> x);

/// Value with Monte Carlo standard error. std_error is exactly 0 only for
/// closed-form or exact-enumeration results.
struct NormEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples_used = 0;
};

/// N coefficient rows a(1)..a(N) together with the frame they act on.
class Sketch {
 public:
  /// Rows drawn iid from `measure` (dimension must match the frame size).
  static Sketch draw(const MeasureSpec& measure, Frame frame, std::size_t rows,
                     std::uint64_t seed);
  /// Rows are uniform random sign vectors in {-1, 1}^n.
  static Sketch rademacher(Frame frame, std::size_t rows, std::uint64_t seed);
  /// Caller-supplied rows; used for deliberately constructed sketches.
  static Sketch from_rows(Matrix coeffs, Frame frame, std::uint64_t seed = 0,
                          std::optional<MeasureSpec> measure = std::nullopt);

  std::size_t rows() const noexcept { return coeffs_.rows(); }
  std::size_t dim() const noexcept { return coeffs_.cols(); }
  const Matrix& coeffs() const noexcept { return coeffs_; }
  const Frame& frame() const noexcept { return frame_; }
  const std::optional<MeasureSpec>& measure() const noexcept { return measure_; }
  std::uint64_t seed() const noexcept { return seed_; }
  /// "measure", "rademacher" or "explicit".
  const std::string& provenance() const noexcept { return provenance_; }

  /// True when |||e_i|||_N = 0 for some basis vector, i.e. the empirical
  /// norm is only a seminorm.
  bool degenerate() const noexcept { return degenerate_; }

 private:
  Sketch(Matrix coeffs, Frame frame, std::uint64_t seed, std::optional<MeasureSpec> measure,
         std::string provenance);

  Matrix coeffs_;
  Frame frame_;
  std::uint64_t seed_ = 0;
  std::optional<MeasureSpec> measure_;
  std::string provenance_;
  bool degenerate_ = false;
};

/// |||x|||_N = (1/N) sum_j ||sum_i a(j)_i x_i v_i||.
double empirical_norm(const Sketch& sketch, std::span<const double> x);

/// MC draws are generated in fixed-size chunks; chunk c uses seed
/// derive_seed(seed, c). Results are independent of the thread count.
inline constexpr std::size_t kMonteCarloChunk = 4096;

/// ||sum_i a_i x_i v_i|| for `samples` draws a ~ measure, in draw order.
std::vector<double> combination_norm_samples(const MeasureSpec& measure, const Frame& frame,
                                             std::span<const double> x, std::size_t samples,
                                             std::uint64_t seed, Execution exec = {});

/// Monte Carlo |||x||| with standard error sample_std / sqrt(mc_samples).
NormEstimate expectation_norm_mc(const MeasureSpec& measure, const Frame& frame,
                                 std::span<const double> x, std::size_t mc_samples,
                                 std::uint64_t seed, Execution exec = {});

/// Closed-form |||x||| for (gaussian_iid | exponential_symmetric_iid,
/// standard-basis frame, plain l_1 ambient norm); nullopt otherwise.
std::optional<NormEstimate> expectation_norm_closed(const MeasureSpec& measure, const Frame& frame,
                                                    std::span<const double> x);

/// Largest n accepted by the exact 2^n enumeration.
inline constexpr std::size_t kMaxExactRademacherDim = 22;

/// Sign averages Ave_eps ||sum eps_i x_i v_i|| and (Ave_eps ||.||^p)^{1/p}.
struct RademacherMoments {
  double avg1 = 0.0;
  double avgp = 0.0;
  double std_error1 = 0.0;
  double std_errorp = 0.0;
  std::size_t samples_used = 0;
};

/// Exact enumeration over {-1,1}^n; throws for n > kMaxExactRademacherDim.
RademacherMoments rademacher_moments_exact(const Frame& frame, std::span<const double> x, double p);
RademacherMoments rademacher_moments_mc(const Frame& frame, std::span<const double> x, double p,
                                        std::size_t mc_samples, std::uint64_t seed,
                                        Execution exec = {});

double rademacher_average_exact(const Frame& frame, std::span<const double> x, double p);
NormEstimate rademacher_average_mc(const Frame& frame, std::span<const double> x, double p,
                                   std::size_t mc_samples, std::uint64_t seed,
                                   Execution exec = {});

/// x / |||x|||, using the closed form when available and MC otherwise.
/// The returned point is on the |||.|||-sphere only up to the estimate's
/// std_error (relative).
std::pair<Vector, NormEstimate> sphere_normalize(const MeasureSpec& measure, const Frame& frame,
                                                 std::span<const double> x,
                                                 std::size_t mc_samples, std::uint64_t seed,
                                                 Execution exec = {});

}  // namespace kksketch
