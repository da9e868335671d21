// Serial reference kernels against their OpenMP versions.
//
//   ./build/bench/bench_kernels --benchmark_filter=enumerate

#include <benchmark/benchmark.h>

#include <random>

#include "assort/kernels.hpp"

using namespace assort;

namespace {

Instance random_instance(int n, int m, double capacity, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto nn = static_cast<std::size_t>(n), mm = static_cast<std::size_t>(m);
  std::vector<double> rho(nn, 1.0 / n), v0(nn), v(nn * mm), r(nn * mm);
  for (auto& x : v0) x = 1.0 + 9.0 * u(rng);
  for (auto& x : v) x = 1.0 + u(rng);
  for (auto& x : r) x = 1.0 + 2.0 * u(rng);
  std::vector<LinearConstraint> cons;
  if (capacity > 0) cons.push_back(LinearConstraint::cardinality(m, capacity));
  return Instance(std::move(rho), std::move(v0), std::move(v), std::move(r), std::move(cons));
}

Assortment half(int m) {
  Assortment x(static_cast<std::size_t>(m), 0);
  for (int j = 0; j < m; j += 2) x[std::size_t(j)] = 1;
  return x;
}

void BM_EnumerateSerial(benchmark::State& state) {
  const auto inst = random_instance(10, int(state.range(0)), state.range(0) / 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::enumerate(inst));
  state.SetItemsProcessed(state.iterations() * (std::int64_t(1) << state.range(0)));
}

void BM_EnumerateOmp(benchmark::State& state) {
  const auto inst = random_instance(10, int(state.range(0)), state.range(0) / 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::enumerate(inst, int(state.range(1))));
  state.SetItemsProcessed(state.iterations() * (std::int64_t(1) << state.range(0)));
}

void BM_CutsSerial(benchmark::State& state) {
  const int n = int(state.range(0)), m = 200;
  const auto inst = random_instance(n, m, 0, 2);
  const auto x = half(m);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::all_class_cuts(inst, x, CutKinds::oa_sc()));
}

void BM_CutsOmp(benchmark::State& state) {
  const int n = int(state.range(0)), m = 200;
  const auto inst = random_instance(n, m, 0, 2);
  const auto x = half(m);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::omp::all_class_cuts(inst, x, CutKinds::oa_sc(), int(state.range(1))));
}

void BM_BoundsSerial(benchmark::State& state) {
  const auto inst = random_instance(int(state.range(0)), 500, 50, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::cardinality_bounds(inst, 50));
}

void BM_BoundsOmp(benchmark::State& state) {
  const auto inst = random_instance(int(state.range(0)), 500, 50, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::cardinality_bounds(inst, 50, int(state.range(1))));
}

void BM_PhiSerial(benchmark::State& state) {
  const auto inst = random_instance(int(state.range(0)), 1000, 0, 4);
  const auto x = half(1000);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::phi_all(inst, x));
}

void BM_PhiOmp(benchmark::State& state) {
  const auto inst = random_instance(int(state.range(0)), 1000, 0, 4);
  const auto x = half(1000);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::phi_all(inst, x, int(state.range(1))));
}

}  // namespace

BENCHMARK(BM_EnumerateSerial)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateOmp)->ArgsProduct({{16, 20}, {1, 2, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CutsSerial)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CutsOmp)->ArgsProduct({{100, 1000}, {1, 2, 4}})->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_BoundsSerial)->Arg(20)->Arg(100)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BoundsOmp)->ArgsProduct({{20, 100}, {1, 2, 4}})->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_PhiSerial)->Arg(100)->Arg(5000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PhiOmp)->ArgsProduct({{100, 5000}, {1, 2, 4}})->Unit(benchmark::kMicrosecond)->UseRealTime();

BENCHMARK_MAIN();
