#include <avgnet/activations.hpp>
#include <avgnet/network.hpp>

#include <benchmark/benchmark.h>

namespace {

avgnet::NetworkSpec TanhNetwork(avgnet::Index dim) {
  avgnet::Rng rng = avgnet::MakeRng(3, "bench/net");
  avgnet::NetworkSpec net;
  net.x0 = avgnet::StandardNormal(rng, dim);
  for (int l = 0; l < 3; ++l) {
    avgnet::Mat w = avgnet::StandardNormal(rng, dim, dim);
    w *= 0.8 / avgnet::SpectralNorm(w);
    net.layers.push_back({w, avgnet::StandardNormal(rng, dim), avgnet::MakeActivation("tanh")});
  }
  return net;
}

void BM_KmIterateNetwork(benchmark::State& state) {
  const auto net = TanhNetwork(state.range(0));
  avgnet::KmOptions options;
  options.tol = 1e-10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(avgnet::KmIterate(net, options));
  }
}
BENCHMARK(BM_KmIterateNetwork)->Arg(4)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_CertifyNetwork(benchmark::State& state) {
  const auto net = TanhNetwork(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(avgnet::CertifyNetwork(net));
  }
}
BENCHMARK(BM_CertifyNetwork)->Arg(4)->Arg(32)->Unit(benchmark::kMicrosecond);

}  // namespace
