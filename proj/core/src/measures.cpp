#include "kksketch/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kksketch/random.hpp"

namespace kksketch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Rank of the facet matrix by Gaussian elimination with partial pivoting.
std::size_t facet_rank(const std::vector<Vector>& facets, std::size_t dim) {
  std::vector<Vector> rows = facets;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < dim && rank < rows.size(); ++col) {
    std::size_t pivot = rank;
    for (std::size_t r = rank; r < rows.size(); ++r) {
      if (std::abs(rows[r][col]) > std::abs(rows[pivot][col])) pivot = r;
    }
    double scale = 0.0;
    for (const auto& r : rows) scale = std::max(scale, std::abs(r[col]));
    if (std::abs(rows[pivot][col]) <= 1e-12 * std::max(1.0, scale)) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const double f = rows[r][col] / rows[rank][col];
      for (std::size_t c = col; c < dim; ++c) rows[r][c] -= f * rows[rank][c];
    }
    ++rank;
  }
  return rank;
}

void fill_gaussian_direction(Rng& rng, std::span<double> d) {
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& v : d) {
      v = rng.normal();
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& v : d) v *= inv;
}

// One hit-and-run step inside {y : |<f_i, y>| <= 1}.
void hit_and_run_step(const std::vector<Vector>& facets, Rng& rng, std::span<double> x,
                      std::span<double> dir) {
  fill_gaussian_direction(rng, dir);
  double lo = -kInf;
  double hi = kInf;
  for (const auto& f : facets) {
    const double a = dot(f, x);
    const double b = dot(f, dir);
    if (b == 0.0) continue;
    double t1 = (-1.0 - a) / b;
    double t2 = (1.0 - a) / b;
    if (t1 > t2) std::swap(t1, t2);
    lo = std::max(lo, t1);
    hi = std::min(hi, t2);
  }
  const double t = rng.uniform(lo, hi);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += t * dir[i];
}

}  // namespace

std::string_view to_string(MeasureFamily family) {
  switch (family) {
    case MeasureFamily::gaussian_iid: return "gaussian_iid";
    case MeasureFamily::exponential_symmetric_iid: return "exponential_symmetric_iid";
    case MeasureFamily::uniform_cube: return "uniform_cube";
    case MeasureFamily::uniform_euclidean_ball: return "uniform_euclidean_ball";
    case MeasureFamily::uniform_polytope: return "uniform_polytope";
  }
  return "unknown";
}

MeasureFamily parse_measure_family(std::string_view name) {
  for (auto f : {MeasureFamily::gaussian_iid, MeasureFamily::exponential_symmetric_iid,
                 MeasureFamily::uniform_cube, MeasureFamily::uniform_euclidean_ball,
                 MeasureFamily::uniform_polytope}) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown measure family: " + std::string(name));
}

MeasureSpec::MeasureSpec(MeasureFamily family, std::size_t dim, double scale)
    : family_(family), dim_(dim), scale_(scale) {
  if (dim == 0) throw std::invalid_argument("measure dimension must be positive");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("measure scale must be positive and finite");
  }
  if (family == MeasureFamily::uniform_polytope) {
    throw std::invalid_argument("uniform_polytope needs facets; use MeasureSpec::polytope");
  }
}

MeasureSpec MeasureSpec::polytope(std::vector<Vector> facets, double scale, HitAndRunConfig walk) {
  if (facets.empty()) throw std::invalid_argument("polytope needs at least one facet");
  const std::size_t dim = facets.front().size();
  if (dim == 0) throw std::invalid_argument("measure dimension must be positive");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("measure scale must be positive and finite");
  }
  for (const auto& f : facets) {
    if (f.size() != dim) throw std::invalid_argument("polytope facets have mixed dimensions");
    for (double v : f) {
      if (!std::isfinite(v)) throw std::invalid_argument("polytope facet has non-finite entry");
    }
  }
  // Each facet pair {+f, -f} is implied by the |<f,x>| <= 1 form; boundedness
  // holds exactly when the normals span R^n.
  if (facet_rank(facets, dim) < dim) {
    throw std::invalid_argument("polytope is unbounded: facet normals do not span R^n");
  }
  MeasureSpec m;
  m.family_ = MeasureFamily::uniform_polytope;
  m.dim_ = dim;
  m.scale_ = scale;
  m.facets_ = std::move(facets);
  m.walk_ = walk;
  return m;
}

MeasureSpec MeasureSpec::cube_as_polytope(std::size_t dim, double scale, HitAndRunConfig walk) {
  if (dim == 0) throw std::invalid_argument("measure dimension must be positive");
  std::vector<Vector> facets(dim, Vector(dim, 0.0));
  for (std::size_t i = 0; i < dim; ++i) facets[i][i] = 1.0;
  return polytope(std::move(facets), scale, walk);
}

std::size_t MeasureSpec::burn_in() const noexcept {
  return walk_.burn_in != 0 ? walk_.burn_in : 10 * dim_;
}

std::size_t MeasureSpec::thinning() const noexcept {
  return walk_.thinning != 0 ? walk_.thinning : dim_;
}

SampleBatch sample(const MeasureSpec& measure, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("sample count must be positive");
  const std::size_t n = measure.dim();
  const double s = measure.scale();
  SampleBatch batch{Matrix(count, n), seed, measure};
  Rng rng(seed);

  switch (measure.family()) {
    case MeasureFamily::gaussian_iid:
      for (std::size_t r = 0; r < count; ++r)
        for (auto& v : batch.points.row(r)) v = s * rng.normal();
      break;
    case MeasureFamily::exponential_symmetric_iid:
      for (std::size_t r = 0; r < count; ++r)
        for (auto& v : batch.points.row(r)) v = s * rng.laplace();
      break;
    case MeasureFamily::uniform_cube:
      for (std::size_t r = 0; r < count; ++r)
        for (auto& v : batch.points.row(r)) v = rng.uniform(-s, s);
      break;
    case MeasureFamily::uniform_euclidean_ball:
      for (std::size_t r = 0; r < count; ++r) {
        auto row = batch.points.row(r);
        fill_gaussian_direction(rng, row);
        const double radius = s * std::pow(rng.uniform01(), 1.0 / static_cast<double>(n));
        for (auto& v : row) v *= radius;
      }
      break;
    case MeasureFamily::uniform_polytope: {
      Vector x(n, 0.0);
      Vector dir(n);
      const auto& facets = measure.facets();
      for (std::size_t k = 0; k < measure.burn_in(); ++k) hit_and_run_step(facets, rng, x, dir);
      for (std::size_t r = 0; r < count; ++r) {
        for (std::size_t k = 0; k < measure.thinning(); ++k) hit_and_run_step(facets, rng, x, dir);
        auto row = batch.points.row(r);
        for (std::size_t i = 0; i < n; ++i) row[i] = s * x[i];
      }
      break;
    }
  }
  return batch;
}

bool in_support(const MeasureSpec& measure, std::span<const double> point, double tol) {
  if (point.size() != measure.dim()) throw std::invalid_argument("point dimension mismatch");
  const double s = measure.scale();
  switch (measure.family()) {
    case MeasureFamily::gaussian_iid:
    case MeasureFamily::exponential_symmetric_iid:
      return true;
    case MeasureFamily::uniform_cube:
      return std::all_of(point.begin(), point.end(),
                         [&](double v) { return std::abs(v) <= s * (1.0 + tol); });
    case MeasureFamily::uniform_euclidean_ball:
      return std::sqrt(dot(point, point)) <= s * (1.0 + tol);
    case MeasureFamily::uniform_polytope:
      return std::all_of(measure.facets().begin(), measure.facets().end(), [&](const Vector& f) {
        return std::abs(dot(f, point)) <= s * (1.0 + tol);
      });
  }
  return false;
}

double log_density(const MeasureSpec& measure, std::span<const double> point) {
  if (point.size() != measure.dim()) throw std::invalid_argument("point dimension mismatch");
  const double s = measure.scale();
  switch (measure.family()) {
    case MeasureFamily::gaussian_iid: {
      double q = 0.0;
      for (double v : point) q += (v / s) * (v / s);
      return -0.5 * q;
    }
    case MeasureFamily::exponential_symmetric_iid: {
      double l1 = 0.0;
      for (double v : point) l1 += std::abs(v) / s;
      return -l1;
    }
    case MeasureFamily::uniform_cube:
    case MeasureFamily::uniform_euclidean_ball:
    case MeasureFamily::uniform_polytope:
      return in_support(measure, point, 0.0) ? 0.0 : -kInf;
  }
  return -kInf;
}

}  // namespace kksketch
