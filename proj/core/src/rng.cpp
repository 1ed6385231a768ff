#include "avgnet/rng.hpp"

namespace avgnet {
namespace {

std::uint64_t Fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t SplitSeed(std::uint64_t seed, std::string_view consumer) {
  return SplitMix64(seed ^ Fnv1a64(consumer));
}

Rng MakeRng(std::uint64_t seed, std::string_view consumer) {
  return Rng(SplitSeed(seed, consumer));
}

Vec UniformInBox(Rng& rng, const Vec& lo, const Vec& hi) {
  RequireSameDim(lo, hi, "UniformInBox");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec v(lo.size());
  for (Index i = 0; i < lo.size(); ++i) {
    v[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
  }
  return v;
}

Vec StandardNormal(Rng& rng, Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

Mat StandardNormal(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

}  // namespace avgnet
