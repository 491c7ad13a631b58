#include <benchmark/benchmark.h>

#include "conu/risk.hpp"

namespace {

struct Batch {
  conu::Matrix scores;
  conu::BitMatrix comp;
  conu::ClassPriors priors;
};

Batch make_batch(conu::Index n, int q) {
  Batch b;
  b.scores = conu::Matrix::Random(n, q) * 3.0;
  b.comp = conu::BitMatrix::Zero(n, q);
  for (conu::Index i = 0; i < n; ++i) b.comp(i, (i * 7) % q) = 1;
  b.priors = {std::vector<double>(q, 1.0 / q), std::vector<double>(q, 1.0 / q)};
  return b;
}

void BM_RiskBitMatrix(benchmark::State& state) {
  const auto b = make_batch(state.range(0), 10);
  conu::Matrix grad;
  for (auto _ : state)
    benchmark::DoNotOptimize(conu::risk_with_grad(b.scores, b.comp, {conu::Correction::Abs, b.priors}, &grad));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RiskBitMatrix)->Arg(256)->Arg(4096);

void BM_RiskDecomposition(benchmark::State& state) {
  const auto b = make_batch(state.range(0), 10);
  const auto dec = conu::decompose(b.comp);
  for (auto _ : state)
    benchmark::DoNotOptimize(conu::corrected_risk(b.scores, dec, b.priors, conu::Correction::Abs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RiskDecomposition)->Arg(256)->Arg(4096);

}  // namespace
