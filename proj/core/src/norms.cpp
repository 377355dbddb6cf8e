#include "kksketch/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kksketch {
namespace {

void check_p(double p) {
  if (std::isnan(p) || p < 1.0) throw std::invalid_argument("l_p norm requires p >= 1");
}

}  // namespace

double lp_norm(std::span<const double> x, double p) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (std::isinf(p) || m == 0.0) return m;
  if (p == 1.0) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (double v : x) {
      const double r = v / m;
      s += r * r;
    }
    return m * std::sqrt(s);
  }
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v) / m, p);
  return m * std::pow(s, 1.0 / p);
}

NormOracle NormOracle::lp(std::size_t dim, double p) {
  if (dim == 0) throw std::invalid_argument("norm dimension must be positive");
  check_p(p);
  NormOracle n;
  n.kind_ = NormKind::lp;
  n.dim_ = dim;
  n.p_ = p;
  return n;
}

NormOracle NormOracle::weighted_lp(double p, Vector weights) {
  if (weights.empty()) throw std::invalid_argument("norm dimension must be positive");
  check_p(p);
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be positive");
  }
  NormOracle n;
  n.kind_ = NormKind::weighted_lp;
  n.dim_ = weights.size();
  n.p_ = p;
  n.weights_ = std::move(weights);
  return n;
}

NormOracle NormOracle::polytope_gauge(std::vector<Vector> facets) {
  if (facets.empty() || facets.front().empty()) {
    throw std::invalid_argument("polytope gauge needs nonempty facets");
  }
  const std::size_t dim = facets.front().size();
  for (const auto& f : facets) {
    if (f.size() != dim) throw std::invalid_argument("polytope gauge facets have mixed dimensions");
  }
  // A gauge is a norm only if the normals span R^n; reuse the same test the
  // polytope measure applies, via a small Gram-Schmidt pass.
  std::vector<Vector> basis;
  for (const auto& f : facets) {
    Vector r = f;
    for (const auto& b : basis) {
      double d = 0.0;
      for (std::size_t i = 0; i < dim; ++i) d += r[i] * b[i];
      for (std::size_t i = 0; i < dim; ++i) r[i] -= d * b[i];
    }
    const double len = lp_norm(r, 2.0);
    if (len > 1e-10 * std::max(1.0, lp_norm(f, 2.0))) {
      for (auto& v : r) v /= len;
      basis.push_back(std::move(r));
    }
  }
  if (basis.size() < dim) {
    throw std::invalid_argument("polytope gauge is degenerate: facet normals do not span R^n");
  }
  NormOracle n;
  n.kind_ = NormKind::polytope_gauge;
  n.dim_ = dim;
  n.p_ = std::numeric_limits<double>::infinity();
  n.facets_ = std::move(facets);
  return n;
}

double NormOracle::operator()(std::span<const double> x) const {
  if (x.size() != dim_) throw std::invalid_argument("norm evaluation: dimension mismatch");
  switch (kind_) {
    case NormKind::lp:
      return lp_norm(x, p_);
    case NormKind::weighted_lp: {
      Vector scaled(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = weights_[i] * x[i];
      return lp_norm(scaled, p_);
    }
    case NormKind::polytope_gauge: {
      double best = 0.0;
      for (const auto& f : facets_) {
        double d = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) d += f[i] * x[i];
        best = std::max(best, std::abs(d));
      }
      return best;
    }
  }
  return 0.0;
}

std::string NormOracle::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case NormKind::lp: os << "l_" << p_; break;
    case NormKind::weighted_lp: os << "weighted l_" << p_; break;
    case NormKind::polytope_gauge: os << "polytope gauge (" << facets_.size() << " facets)"; break;
  }
  os << " on R^" << dim_;
  return os.str();
}

}  // namespace kksketch
