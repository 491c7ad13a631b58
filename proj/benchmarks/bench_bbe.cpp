#include <benchmark/benchmark.h>

#include <random>

#include "conu/prior_estimation.hpp"

namespace {

void BM_BbeSelect(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> zp(static_cast<std::size_t>(state.range(0))), zu(zp.size());
  for (auto& v : zp) v = std::sqrt(u(rng));
  for (auto& v : zu) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(conu::bbe_select(zp, zu, 0.01, 0.1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BbeSelect)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

}  // namespace
