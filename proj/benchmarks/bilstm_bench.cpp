#include <benchmark/benchmark.h>

#include <random>

#include "nameproxy/bilstm.hpp"

using namespace nameproxy;

namespace {

nn::NetworkShape shape_for(int embed, int hidden, int layers) {
  nn::NetworkShape s;
  s.embed_dim = embed;
  s.hidden = hidden;
  s.layers = layers;
  return s;
}

nn::TokenBatch batch_of(std::size_t n) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> code(1, 26);
  nn::TokenBatch b(n, std::vector<int>(kWindow, 0));
  for (auto& seq : b) {
    for (std::size_t t = 0; t < 14; ++t) seq[t] = code(rng);
  }
  return b;
}

// args: batch, embed, hidden, layers
void BM_Forward(benchmark::State& state) {
  const auto params = nn::NetworkParams::initialize(
      shape_for(int(state.range(1)), int(state.range(2)), int(state.range(3))), 1);
  const auto batch = batch_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto out = nn::forward(params, batch);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)
    ->Args({64, 32, 64, 2})
    ->Args({512, 32, 64, 2})
    ->Args({64, 256, 512, 4})
    ->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  auto params = nn::NetworkParams::initialize(shape_for(int(state.range(1)), int(state.range(2)), int(state.range(3))), 1);
  const auto batch = batch_of(static_cast<std::size_t>(state.range(0)));
  std::vector<std::size_t> labels(batch.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 4;
  auto adam = nn::AdamState::for_params(params, nn::AdamConfig{});
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto lg = nn::loss_and_gradients(params, batch, labels, {nn::Mode::train, seed++});
    nn::adam_step(params, lg.gradients, adam);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainStep)->Args({32, 32, 64, 2})->Args({512, 32, 64, 2})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
