#include <benchmark/benchmark.h>

#include "treedim/analysis.hpp"
#include "treedim/permgroup.hpp"

using namespace treedim;

namespace {

void BM_QuotientW2(benchmark::State& state) {
  const auto& s = *fixture("w2");
  auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(quotient(s, n).order());
}
BENCHMARK(BM_QuotientW2)->DenseRange(6, 12, 2)->Unit(benchmark::kMillisecond);

void BM_QuotientGrigorchuk(benchmark::State& state) {
  const auto& s = *fixture("grigorchuk");
  auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(quotient(s, n).order());
}
BENCHMARK(BM_QuotientGrigorchuk)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  const auto& s = *fixture("grigorchuk");
  auto n = static_cast<std::size_t>(state.range(0));
  auto gens = generators_at(s, n);
  for (auto _ : state) {
    for (const auto& g : gens) benchmark::DoNotOptimize(evaluate(g, n));
  }
}
BENCHMARK(BM_Evaluate)->DenseRange(8, 12, 2);

void BM_DerivedSubgroup(benchmark::State& state) {
  const auto& s = *fixture("grigorchuk");
  auto g = quotient(s, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(derived_subgroup(g).order());
}
BENCHMARK(BM_DerivedSubgroup)->DenseRange(4, 7, 1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
