#include <avgnet/activations.hpp>
#include <avgnet/operator_core.hpp>

#include <benchmark/benchmark.h>

namespace {

void BM_CheckAveragedSigmoid(benchmark::State& state) {
  const auto spec = avgnet::MakeActivation("sigmoid");
  avgnet::SamplingOptions s;
  s.pairs = static_cast<std::size_t>(state.range(0));
  const auto pairs = avgnet::SamplePairs(1, s, "bench/check");
  for (auto _ : state) {
    benchmark::DoNotOptimize(avgnet::CheckAveraged(spec.eval, 0.625, pairs, 1e-9));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CheckAveragedSigmoid)->Arg(1000)->Arg(10000);

void BM_EstimateGammaTanh(benchmark::State& state) {
  const auto spec = avgnet::MakeActivation("tanh");
  avgnet::EstimateOptions options;
  options.samples = 2000;
  const avgnet::Vec lo = avgnet::Vec::Constant(1, -20.0);
  const avgnet::Vec hi = avgnet::Vec::Constant(1, 20.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(avgnet::EstimateGamma(spec.eval, lo, hi, options));
  }
}
BENCHMARK(BM_EstimateGammaTanh);

}  // namespace
