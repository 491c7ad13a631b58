#include <benchmark/benchmark.h>

#include "conu/model.hpp"

namespace {

void BM_Forward(benchmark::State& state) {
  const auto width = state.range(0);
  const auto p = conu::init_params(conu::ModelConfig::mlp(10, 10, {width, width, width}), 1);
  const conu::Matrix x = conu::Matrix::Random(256, 10);
  for (auto _ : state) benchmark::DoNotOptimize(conu::forward(p, x));
  state.SetItemsProcessed(state.iterations() * x.rows());
}
BENCHMARK(BM_Forward)->Arg(64)->Arg(300);

void BM_RiskAndGrad(benchmark::State& state) {
  const auto width = state.range(0);
  const auto p = conu::init_params(conu::ModelConfig::mlp(10, 10, {width, width, width}), 1);
  const conu::Matrix x = conu::Matrix::Random(256, 10);
  conu::BitMatrix comp = conu::BitMatrix::Zero(256, 10);
  for (conu::Index i = 0; i < 256; ++i) comp(i, i % 10) = 1;
  const conu::ClassPriors pr{std::vector<double>(10, 0.1), std::vector<double>(10, 0.1)};
  for (auto _ : state) benchmark::DoNotOptimize(conu::risk_and_grad(p, x, comp, {conu::Correction::Abs, pr}));
  state.SetItemsProcessed(state.iterations() * x.rows());
}
BENCHMARK(BM_RiskAndGrad)->Arg(64)->Arg(300);

}  // namespace
