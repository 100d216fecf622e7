#include <benchmark/benchmark.h>

#include <random>

#include "cmqe/eval.hpp"
#include "cmqe/metrics.hpp"

namespace {

using namespace cmqe;

TaggedSentence make_sentence(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> lid(0, 2);
  std::uniform_int_distribution<std::size_t> pos(0, kPosCount);
  TaggedSentence s{"bench", {}};
  for (std::size_t i = 0; i < n; ++i) {
    TaggedToken t{"tok", static_cast<Lid>(lid(rng)), std::nullopt};
    if (const auto p = pos(rng); p < kPosCount) t.pos = kAllPos[p];
    s.tokens.push_back(t);
  }
  return s;
}

void BM_MetricVector(benchmark::State& state) {
  const auto s = make_sentence(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(metric_vector(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MetricVector)->Arg(8)->Arg(32)->Arg(256);

void BM_F1AndKappa(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> label(1, 10);
  std::vector<int> gold(static_cast<std::size_t>(state.range(0)));
  std::vector<int> pred(gold.size());
  for (auto& x : gold) x = label(rng);
  for (auto& x : pred) x = label(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(f1_score(gold, pred, F1Average::Weighted));
    benchmark::DoNotOptimize(cohen_kappa(gold, pred));
  }
}
BENCHMARK(BM_F1AndKappa)->Arg(100)->Arg(10000);

}  // namespace
