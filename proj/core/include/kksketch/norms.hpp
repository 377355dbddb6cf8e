#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kksketch/matrix.hpp"

namespace kksketch {

enum class NormKind { lp, weighted_lp, polytope_gauge };

/// A norm on R^dim: l_p (p in [1, inf]), weighted l_p (||w∘x||_p), or the
/// gauge max_i |<f_i, x>| of a symmetric polytope. Immutable; evaluation is pure.
class NormOracle {
 public:
  static NormOracle lp(std::size_t dim, double p);
  static NormOracle weighted_lp(double p, Vector weights);
  static NormOracle polytope_gauge(std::vector<Vector> facets);

  NormKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  /// Exponent for the l_p kinds; +infinity for l_inf.
  double p() const noexcept { return p_; }
  const Vector& weights() const noexcept { return weights_; }
  const std::vector<Vector>& facets() const noexcept { return facets_; }

  /// True for the unweighted l_1 norm.
  bool is_plain_l1() const noexcept { return kind_ == NormKind::lp && p_ == 1.0; }

  double operator()(std::span<const double> x) const;

  std::string describe() const;

  friend bool operator==(const NormOracle&, const NormOracle&) = default;

 private:
  NormOracle() = default;

  NormKind kind_ = NormKind::lp;
  std::size_t dim_ = 0;
  double p_ = 2.0;
  Vector weights_;
  std::vector<Vector> facets_;
};

/// ||x||_p of a raw span, p in [1, inf]. Finite p uses max-factoring,
/// ||x||_p = M (sum (|x_i|/M)^p)^{1/p} with M = max |x_i|.
double lp_norm(std::span<const double> x, double p);

inline double evaluate(const NormOracle& norm, std::span<const double> x) { return norm(x); }

}  // namespace kksketch
