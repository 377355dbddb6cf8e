#include "kksketch/stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace kksketch {
namespace {

Proportion make_proportion(std::size_t hits, std::size_t total) {
  Proportion p;
  p.samples = total;
  if (total == 0) return p;
  p.value = static_cast<double>(hits) / static_cast<double>(total);
  p.std_error = std::sqrt(p.value * (1.0 - p.value) / static_cast<double>(total));
  return p;
}

}  // namespace

double empirical_quantile(std::vector<double>& values, double level) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(level > 0.0 && level <= 1.0)) throw std::invalid_argument("quantile level must be in (0, 1]");
  const auto n = values.size();
  auto k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
  k = std::clamp<std::size_t>(k, 1, n);
  auto it = values.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(values.begin(), it, values.end());
  return *it;
}

Proportion proportion_at_least(std::span<const double> values, double threshold) {
  const auto hits = static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [&](double v) { return v >= threshold; }));
  return make_proportion(hits, values.size());
}

Proportion proportion_at_most(std::span<const double> values, double threshold) {
  const auto hits = static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [&](double v) { return v <= threshold; }));
  return make_proportion(hits, values.size());
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace kksketch
