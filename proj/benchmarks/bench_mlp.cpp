#include <benchmark/benchmark.h>

#include <random>

#include "cmqe/features.hpp"
#include "cmqe/mlp.hpp"

namespace {

using namespace cmqe;

MlpConfig full_size_config() {
  MlpConfig c;
  c.input_dim = FeatureLayout{}.dimension();
  return c;
}

Eigen::MatrixXd random_batch(std::size_t dim, std::size_t n) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = d(rng);
  return x;
}

void BM_ForwardBatch(benchmark::State& state) {
  const auto config = full_size_config();
  const auto model = init_model(config);
  const auto x = random_batch(config.input_dim, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(forward_batch(model, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBatch)->Arg(1)->Arg(200);

void BM_GradientStep(benchmark::State& state) {
  const auto config = full_size_config();
  auto model = init_model(config);
  const auto x = random_batch(config.input_dim, 200);
  const Eigen::VectorXd t = Eigen::VectorXd::Constant(200, 5.0);
  AdamState adam(model.layers);
  for (auto _ : state) {
    const auto g = gradients(model, x, t);
    adam.step(model.layers, g.layers, 1e-4);
  }
}
BENCHMARK(BM_GradientStep)->Unit(benchmark::kMillisecond);

}  // namespace
