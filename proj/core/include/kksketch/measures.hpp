#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kksketch/matrix.hpp"

namespace kksketch {

enum class MeasureFamily {
  gaussian_iid,
  exponential_symmetric_iid,
  uniform_cube,
  uniform_euclidean_ball,
  uniform_polytope,
};

std::string_view to_string(MeasureFamily family);
MeasureFamily parse_measure_family(std::string_view name);

/// Mixing schedule for the hit-and-run walk used by uniform_polytope.
/// Zero means the dimension-based default (10n burn-in, n steps per sample).
struct HitAndRunConfig {
  std::size_t burn_in = 0;
  std::size_t thinning = 0;

  friend bool operator==(const HitAndRunConfig&, const HitAndRunConfig&) = default;
};

/// A symmetric log-concave probability measure on R^n. Immutable once built;
/// construction validates the parameters, so an existing MeasureSpec is
/// always samplable.
class MeasureSpec {
 public:
  /// iid and ball families.
  MeasureSpec(MeasureFamily family, std::size_t dim, double scale = 1.0);

  /// scale * {x : |<f_i, x>| <= 1 for all i}. The facet normals must span R^n.
  static MeasureSpec polytope(std::vector<Vector> facets, double scale = 1.0,
                              HitAndRunConfig walk = {});

  /// The cube [-scale, scale]^n written as a polytope (standard-basis facets).
  static MeasureSpec cube_as_polytope(std::size_t dim, double scale = 1.0,
                                      HitAndRunConfig walk = {});

  MeasureFamily family() const noexcept { return family_; }
  std::size_t dim() const noexcept { return dim_; }
  double scale() const noexcept { return scale_; }
  const std::vector<Vector>& facets() const noexcept { return facets_; }
  std::size_t burn_in() const noexcept;
  std::size_t thinning() const noexcept;

  friend bool operator==(const MeasureSpec&, const MeasureSpec&) = default;

 private:
  MeasureSpec() = default;

  MeasureFamily family_ = MeasureFamily::gaussian_iid;
  std::size_t dim_ = 0;
  double scale_ = 1.0;
  std::vector<Vector> facets_;
  HitAndRunConfig walk_;
};

struct SampleBatch {
  Matrix points;  // count x dim
  std::uint64_t seed = 0;
  MeasureSpec measure;
};

/// `count` draws from `measure`, a pure function of (measure, count, seed).
/// iid families draw coordinates directly; uniform_polytope runs one
/// hit-and-run chain from the origin with the configured burn-in and thinning.
SampleBatch sample(const MeasureSpec& measure, std::size_t count, std::uint64_t seed);

/// Log-density up to a measure-wide additive constant. Uniform families
/// return 0 inside the support and -infinity outside.
double log_density(const MeasureSpec& measure, std::span<const double> point);

/// True if `point` lies in the support (always true for unbounded families).
bool in_support(const MeasureSpec& measure, std::span<const double> point, double tol = 1e-12);

}  // namespace kksketch
