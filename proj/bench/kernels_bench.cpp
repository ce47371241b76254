// Serial reference vs OpenMP kernels, plus one end-to-end residual
// evaluation. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mfe/kernels.hpp"
#include "mfe/meanfield.hpp"
#include "mfe/random.hpp"

namespace {

std::vector<double> data(std::size_t n, std::uint64_t seed) {
  mfe::Xoshiro256 rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform(-2.0, 2.0);
  return x;
}

template <double (*F)(std::span<const double>)>
void reduce(benchmark::State& state) {
  const auto x = data(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(F(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <double (*F)(std::span<const double>, double, double)>
void reduce_exp(benchmark::State& state) {
  const auto x = data(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(F(x, 0.7, 1.4));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <void (*F)(std::span<const double>, double, double, std::span<double>)>
void pointwise_exp(benchmark::State& state) {
  const auto x = data(static_cast<std::size_t>(state.range(0)), 3);
  std::vector<double> out(x.size());
  for (auto _ : state) {
    F(x, 0.7, 1.4, out);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void residual(benchmark::State& state) {
  const mfe::TorusGrid g(2 * std::numbers::pi, static_cast<int>(state.range(0)));
  mfe::Xoshiro256 rng(4);
  const mfe::Field v = mfe::random_band_limited(g, rng, 8);
  const mfe::ProblemSpec spec{mfe::Variant::Neri, 20.0, mfe::IntensityMeasure::uniform_quadrature(5), g};
  for (auto _ : state) benchmark::DoNotOptimize(mfe::residual(spec, v));
}

namespace k = mfe::kernels;
namespace ks = mfe::kernels::serial;

constexpr long kLo = 1 << 12, kHi = 1 << 20;

}  // namespace

BENCHMARK(reduce<ks::sum>)->Name("sum/serial")->RangeMultiplier(4)->Range(kLo, kHi);
BENCHMARK(reduce<k::sum>)->Name("sum/openmp")->RangeMultiplier(4)->Range(kLo, kHi);
BENCHMARK(reduce<ks::max_value>)->Name("max/serial")->RangeMultiplier(4)->Range(kLo, kHi);
BENCHMARK(reduce<k::max_value>)->Name("max/openmp")->RangeMultiplier(4)->Range(kLo, kHi);
BENCHMARK(reduce_exp<ks::sum_exp_shifted>)->Name("sum_exp/serial")->RangeMultiplier(4)->Range(kLo, kHi);
BENCHMARK(reduce_exp<k::sum_exp_shifted>)->Name("sum_exp/openmp")->RangeMultiplier(4)->Range(kLo, kHi);
BENCHMARK(pointwise_exp<ks::exp_shifted>)->Name("exp/serial")->RangeMultiplier(4)->Range(kLo, kHi);
BENCHMARK(pointwise_exp<k::exp_shifted>)->Name("exp/openmp")->RangeMultiplier(4)->Range(kLo, kHi);
BENCHMARK(residual)->Name("residual/openmp")->Arg(64)->Arg(256);

BENCHMARK_MAIN();
