#include "kksketch/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kksketch/random.hpp"
#include "kksketch/stats.hpp"

namespace kksketch {
namespace {

void require_length(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

std::size_t chunk_count(std::size_t samples) {
  return (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
}

std::size_t chunk_size(std::size_t samples, std::size_t c) {
  return std::min(kMonteCarloChunk, samples - c * kMonteCarloChunk);
}

bool all_zero(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
}

}  // namespace

// ---------------------------------------------------------------- Frame

Frame::Frame(std::vector<Vector> vectors, NormOracle ambient)
    : vectors_(std::move(vectors)), ambient_(std::move(ambient)) {
  if (vectors_.empty()) throw std::invalid_argument("frame needs at least one vector");
  bool basis = vectors_.size() == ambient_.dim();
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    auto& v = vectors_[i];
    if (v.size() != ambient_.dim()) throw std::invalid_argument("frame vector dimension mismatch");
    const double len = ambient_(v);
    if (!(len > 0.0) || !std::isfinite(len)) throw std::invalid_argument("frame vector has zero norm");
    if (len != 1.0) {
      for (auto& c : v) c /= len;
    }
    for (std::size_t k = 0; k < v.size() && basis; ++k) {
      if (v[k] != (k == i ? 1.0 : 0.0)) basis = false;
    }
  }
  standard_basis_ = basis;
}

Frame Frame::standard_basis(std::size_t n, NormOracle ambient) {
  if (ambient.dim() != n) throw std::invalid_argument("standard basis frame: ambient dimension must equal n");
  std::vector<Vector> vs(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) vs[i][i] = 1.0;
  return Frame(std::move(vs), std::move(ambient));
}

Frame Frame::random(std::size_t n, NormOracle ambient, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("frame needs at least one vector");
  Rng rng(seed);
  std::vector<Vector> vs(n, Vector(ambient.dim()));
  for (auto& v : vs) {
    for (auto& c : v) c = rng.normal();
  }
  return Frame(std::move(vs), std::move(ambient));
}

void Frame::combine(std::span<const double> a, std::span<const double> x, std::span<double> out) const {
  const std::size_t n = size();
  if (standard_basis_) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * x[i];
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = a[i] * x[i];
    if (c == 0.0) continue;
    const auto& v = vectors_[i];
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += c * v[k];
  }
}

double Frame::combination_norm(std::span<const double> a, std::span<const double> x,
                               std::span<double> scratch) const {
  if (standard_basis_ && ambient_.is_plain_l1()) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] * x[i]);
    return s;
  }
  combine(a, x, scratch);
  return ambient_(scratch);
}

Vector weighted_sum(const Frame& frame, std::span<const double> a, std::span<const double> x) {
  require_length(a, frame.size(), "weighted_sum");
  require_length(x, frame.size(), "weighted_sum");
  Vector out(frame.ambient_dim());
  frame.combine(a, x, out);
  return out;
}

// ---------------------------------------------------------------- Sketch

Sketch::Sketch(Matrix coeffs, Frame frame, std::uint64_t seed, std::optional<MeasureSpec> measure,
               std::string provenance)
    : coeffs_(std::move(coeffs)),
      frame_(std::move(frame)),
      seed_(seed),
      measure_(std::move(measure)),
      provenance_(std::move(provenance)) {
  if (coeffs_.rows() == 0) throw std::invalid_argument("sketch needs at least one row");
  if (coeffs_.cols() != frame_.size()) throw std::invalid_argument("sketch rows must have n entries");
  // |||e_i|||_N = mean_j |a(j)_i| since ||v_i|| = 1; zero iff column i vanishes.
  for (std::size_t i = 0; i < coeffs_.cols() && !degenerate_; ++i) {
    bool zero = true;
    for (std::size_t j = 0; j < coeffs_.rows() && zero; ++j) zero = coeffs_(j, i) == 0.0;
    degenerate_ = zero;
  }
}

Sketch Sketch::draw(const MeasureSpec& measure, Frame frame, std::size_t rows, std::uint64_t seed) {
  if (measure.dim() != frame.size()) throw std::invalid_argument("measure dimension must equal frame size");
  auto batch = sample(measure, rows, seed);
  return Sketch(std::move(batch.points), std::move(frame), seed, measure, "measure");
}

Sketch Sketch::rademacher(Frame frame, std::size_t rows, std::uint64_t seed) {
  if (rows == 0) throw std::invalid_argument("sketch needs at least one row");
  Rng rng(seed);
  Matrix coeffs(rows, frame.size());
  for (std::size_t j = 0; j < rows; ++j)
    for (auto& v : coeffs.row(j)) v = rng.sign();
  return Sketch(std::move(coeffs), std::move(frame), seed, std::nullopt, "rademacher");
}

Sketch Sketch::from_rows(Matrix coeffs, Frame frame, std::uint64_t seed,
                         std::optional<MeasureSpec> measure) {
  return Sketch(std::move(coeffs), std::move(frame), seed, std::move(measure), "explicit");
}

double empirical_norm(const Sketch& sketch, std::span<const double> x) {
  require_length(x, sketch.dim(), "empirical_norm");
  const auto& frame = sketch.frame();
  Vector scratch(frame.ambient_dim());
  double total = 0.0;
  for (std::size_t j = 0; j < sketch.rows(); ++j) {
    total += frame.combination_norm(sketch.coeffs().row(j), x, scratch);
  }
  return total / static_cast<double>(sketch.rows());
}

// ---------------------------------------------------------------- Monte Carlo

std::vector<double> combination_norm_samples(const MeasureSpec& measure, const Frame& frame,
                                             std::span<const double> x, std::size_t samples,
                                             std::uint64_t seed, Execution exec) {
  require_length(x, frame.size(), "combination_norm_samples");
  if (measure.dim() != frame.size()) throw std::invalid_argument("measure dimension must equal frame size");
  std::vector<double> out(samples);
  parallel_for(chunk_count(samples), exec, [&](std::size_t c) {
    const std::size_t count = chunk_size(samples, c);
    const auto batch = sample(measure, count, derive_seed(seed, c));
    Vector scratch(frame.ambient_dim());
    for (std::size_t r = 0; r < count; ++r) {
      out[c * kMonteCarloChunk + r] = frame.combination_norm(batch.points.row(r), x, scratch);
    }
  });
  return out;
}

NormEstimate expectation_norm_mc(const MeasureSpec& measure, const Frame& frame,
                                 std::span<const double> x, std::size_t mc_samples,
                                 std::uint64_t seed, Execution exec) {
  if (mc_samples < 2) throw std::invalid_argument("expectation_norm_mc needs at least 2 samples");
  require_length(x, frame.size(), "expectation_norm_mc");
  if (all_zero(x)) return {0.0, 0.0, mc_samples};
  if (measure.dim() != frame.size()) throw std::invalid_argument("measure dimension must equal frame size");

  std::vector<RunningMoments> partial(chunk_count(mc_samples));
  parallel_for(partial.size(), exec, [&](std::size_t c) {
    const std::size_t count = chunk_size(mc_samples, c);
    const auto batch = sample(measure, count, derive_seed(seed, c));
    Vector scratch(frame.ambient_dim());
    RunningMoments m;
    for (std::size_t r = 0; r < count; ++r) m.add(frame.combination_norm(batch.points.row(r), x, scratch));
    partial[c] = m;
  });
  RunningMoments total;
  for (const auto& m : partial) total.merge(m);
  return {total.mean(), total.std_error(), mc_samples};
}

std::optional<NormEstimate> expectation_norm_closed(const MeasureSpec& measure, const Frame& frame,
                                                    std::span<const double> x) {
  require_length(x, frame.size(), "expectation_norm_closed");
  if (!frame.is_standard_basis() || !frame.ambient_norm().is_plain_l1()) return std::nullopt;
  if (measure.dim() != frame.size()) return std::nullopt;
  double per_coordinate = 0.0;  // E|a_i|
  switch (measure.family()) {
    case MeasureFamily::gaussian_iid:
      per_coordinate = std::sqrt(2.0 / std::numbers::pi) * measure.scale();
      break;
    case MeasureFamily::exponential_symmetric_iid:
      per_coordinate = measure.scale();
      break;
    default:
      return std::nullopt;
  }
  return NormEstimate{per_coordinate * lp_norm(x, 1.0), 0.0, 0};
}

// ---------------------------------------------------------------- Rademacher averages

RademacherMoments rademacher_moments_exact(const Frame& frame, std::span<const double> x, double p) {
  require_length(x, frame.size(), "rademacher_average_exact");
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("rademacher average requires finite p >= 1");
  const std::size_t n = frame.size();
  if (n > kMaxExactRademacherDim) {
    throw std::invalid_argument("exact Rademacher enumeration is limited to n <= 22; use rademacher_average_mc");
  }
  RademacherMoments out;
  out.samples_used = std::size_t{1} << n;
  if (all_zero(x)) return out;

  // ||sum eps_i x_i v_i|| is even in eps, so enumerate eps_0 = +1 only and
  // walk the remaining n-1 signs in Gray-code order, one flip per step.
  const std::size_t m = frame.ambient_dim();
  std::vector<double> eps(n, 1.0);
  Vector sum(m);
  auto rebuild = [&] { frame.combine(eps, x, sum); };
  rebuild();

  CompensatedSum s1;
  CompensatedSum sp;
  const bool p_is_one = p == 1.0;
  const std::size_t steps = std::size_t{1} << (n - 1);
  for (std::size_t k = 0; k < steps; ++k) {
    if (k != 0) {
      const auto bit = static_cast<std::size_t>(std::countr_zero(k)) + 1;
      eps[bit] = -eps[bit];
      if ((k & 1023) == 0) {
        rebuild();
      } else {
        const double c = 2.0 * eps[bit] * x[bit];
        const auto& v = frame.vector(bit);
        for (std::size_t j = 0; j < m; ++j) sum[j] += c * v[j];
      }
    }
    const double value = frame.ambient_norm()(sum);
    s1.add(value);
    if (!p_is_one) sp.add(std::pow(value, p));
  }
  const auto count = static_cast<double>(steps);
  out.avg1 = s1.value() / count;
  out.avgp = p_is_one ? out.avg1 : std::pow(sp.value() / count, 1.0 / p);
  return out;
}

RademacherMoments rademacher_moments_mc(const Frame& frame, std::span<const double> x, double p,
                                        std::size_t mc_samples, std::uint64_t seed, Execution exec) {
  require_length(x, frame.size(), "rademacher_average_mc");
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("rademacher average requires finite p >= 1");
  if (mc_samples < 2) throw std::invalid_argument("rademacher_average_mc needs at least 2 samples");
  RademacherMoments out;
  out.samples_used = mc_samples;
  if (all_zero(x)) return out;

  const std::size_t n = frame.size();
  struct Partial {
    RunningMoments first;
    RunningMoments power;
  };
  std::vector<Partial> partial(chunk_count(mc_samples));
  parallel_for(partial.size(), exec, [&](std::size_t c) {
    const std::size_t count = chunk_size(mc_samples, c);
    Rng rng(derive_seed(seed, c));
    Vector eps(n);
    Vector scratch(frame.ambient_dim());
    Partial part;
    for (std::size_t r = 0; r < count; ++r) {
      for (auto& e : eps) e = rng.sign();
      const double value = frame.combination_norm(eps, x, scratch);
      part.first.add(value);
      part.power.add(p == 1.0 ? value : std::pow(value, p));
    }
    partial[c] = part;
  });
  Partial total;
  for (const auto& part : partial) {
    total.first.merge(part.first);
    total.power.merge(part.power);
  }
  out.avg1 = total.first.mean();
  out.std_error1 = total.first.std_error();
  if (p == 1.0) {
    out.avgp = out.avg1;
    out.std_errorp = out.std_error1;
  } else {
    const double mp = total.power.mean();
    out.avgp = std::pow(mp, 1.0 / p);
    // Delta method for mp^{1/p}.
    out.std_errorp = mp > 0.0 ? total.power.std_error() * out.avgp / (p * mp) : 0.0;
  }
  return out;
}

double rademacher_average_exact(const Frame& frame, std::span<const double> x, double p) {
  return rademacher_moments_exact(frame, x, p).avgp;
}

NormEstimate rademacher_average_mc(const Frame& frame, std::span<const double> x, double p,
                                   std::size_t mc_samples, std::uint64_t seed, Execution exec) {
  const auto m = rademacher_moments_mc(frame, x, p, mc_samples, seed, exec);
  return {m.avgp, m.std_errorp, m.samples_used};
}

std::pair<Vector, NormEstimate> sphere_normalize(const MeasureSpec& measure, const Frame& frame,
                                                 std::span<const double> x,
                                                 std::size_t mc_samples, std::uint64_t seed,
                                                 Execution exec) {
  require_length(x, frame.size(), "sphere_normalize");
  if (all_zero(x)) throw std::invalid_argument("sphere_normalize: x must be nonzero");
  auto estimate = expectation_norm_closed(measure, frame, x);
  if (!estimate) estimate = expectation_norm_mc(measure, frame, x, mc_samples, seed, exec);
  Vector out(x.begin(), x.end());
  for (auto& v : out) v /= estimate->value;
  return {std::move(out), *estimate};
}

}  // namespace kksketch
