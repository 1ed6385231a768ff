#include <avgnet/llm.hpp>

#include <benchmark/benchmark.h>

namespace {

void BM_AttentionLayer(benchmark::State& state) {
  const avgnet::Index n = state.range(0);
  const avgnet::Index d = 16;
  avgnet::Rng rng = avgnet::MakeRng(5, "bench/attention");
  const avgnet::Mat x = avgnet::StandardNormal(rng, n, d);
  std::vector<avgnet::AttentionHead> heads;
  for (int h = 0; h < 4; ++h) {
    heads.push_back({0.1 * avgnet::StandardNormal(rng, d, d),
                     0.1 * avgnet::StandardNormal(rng, d, d)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        avgnet::AttentionLayer(x, heads, avgnet::SoftmaxMode::kRowwise));
  }
}
BENCHMARK(BM_AttentionLayer)->RangeMultiplier(4)->Range(8, 512)->Unit(benchmark::kMicrosecond);

void BM_MaskedSoftmax(benchmark::State& state) {
  const avgnet::Index n = state.range(0);
  avgnet::Rng rng = avgnet::MakeRng(5, "bench/softmax");
  const avgnet::Mat a = avgnet::StandardNormal(rng, n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(avgnet::MaskedSoftmax(a, avgnet::SoftmaxMode::kGlobal));
  }
}
BENCHMARK(BM_MaskedSoftmax)->RangeMultiplier(4)->Range(8, 512);

}  // namespace
