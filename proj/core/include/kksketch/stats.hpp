#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace kksketch {

/// Welford accumulator with Chan's pairwise merge.
class RunningMoments {
 public:
  void add(double v) {
    ++count_;
    const double d = v - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (v - mean_);
  }

  void merge(const RunningMoments& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(count_ + other.count_);
    const double d = other.mean_ - mean_;
    mean_ += d * static_cast<double>(other.count_) / total;
    m2_ += other.m2_ + d * d * static_cast<double>(count_) * static_cast<double>(other.count_) / total;
    count_ += other.count_;
  }

  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; 0 with fewer than two observations.
  double variance() const noexcept {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  double std_error() const noexcept {
    return count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Lower empirical quantile: the smallest sample value v with
/// #{samples <= v} >= level * count. Reorders `values`.
double empirical_quantile(std::vector<double>& values, double level);

/// Fraction of values >= threshold, with binomial standard error.
struct Proportion {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

Proportion proportion_at_least(std::span<const double> values, double threshold);
Proportion proportion_at_most(std::span<const double> values, double threshold);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|. Copies its inputs.
double ks_statistic(std::vector<double> a, std::vector<double> b);

}  // namespace kksketch
