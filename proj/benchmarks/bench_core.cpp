#include <benchmark/benchmark.h>

#include "kksketch/measures.hpp"
#include "kksketch/random.hpp"
#include "kksketch/sketch.hpp"

using namespace kksketch;

namespace {

Vector direction(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Vector x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

void BM_SampleGaussian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MeasureSpec measure(MeasureFamily::gaussian_iid, n);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample(measure, 1000, ++seed));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SampleGaussian)->Arg(10)->Arg(100);

void BM_HitAndRunCube(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto measure = MeasureSpec::cube_as_polytope(n);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample(measure, 100, ++seed));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_HitAndRunCube)->Arg(5)->Arg(20);

void BM_EmpiricalNorm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto l1 = Frame::standard_basis(n, NormOracle::lp(n, 1.0));
  const auto l2 = Frame::random(n, NormOracle::lp(2 * n, 2.0), 1);
  const auto& frame = state.range(1) == 0 ? l1 : l2;
  const auto sketch = Sketch::draw(MeasureSpec(MeasureFamily::gaussian_iid, n), frame, 3 * n / 2, 2);
  const auto x = direction(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_norm(sketch, x));
}
BENCHMARK(BM_EmpiricalNorm)->Args({50, 0})->Args({50, 1})->Args({200, 0})->Args({200, 1});

void BM_RademacherExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto frame = Frame::standard_basis(n, NormOracle::lp(n, 2.0));
  const auto x = direction(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(rademacher_average_exact(frame, x, 2.0));
}
BENCHMARK(BM_RademacherExact)->Arg(10)->Arg(16);

void BM_ExpectationNormMC(benchmark::State& state) {
  const std::size_t n = 20;
  const MeasureSpec measure(MeasureFamily::uniform_cube, n);
  const auto frame = Frame::random(n, NormOracle::lp(n, 1.5), 5);
  const auto x = direction(n, 6);
  const Execution exec{static_cast<unsigned>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(expectation_norm_mc(measure, frame, x, 100000, 7, exec));
}
BENCHMARK(BM_ExpectationNormMC)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
