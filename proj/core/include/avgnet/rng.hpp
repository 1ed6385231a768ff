#pragma once

#include "avgnet/types.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace avgnet {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 20231001;

/// Derives an independent stream seed for a named consumer from the run seed.
///
/// Key scheme: splitmix64(seed XOR fnv1a64(consumer)). Every sampled
/// procedure asks for its own stream by name, so adding a consumer never
/// shifts the draws of another one.
std::uint64_t SplitSeed(std::uint64_t seed, std::string_view consumer);

Rng MakeRng(std::uint64_t seed, std::string_view consumer);

// Uniform sample in the axis-aligned box [lo, hi].
Vec UniformInBox(Rng& rng, const Vec& lo, const Vec& hi);

Vec StandardNormal(Rng& rng, Index n);

Mat StandardNormal(Rng& rng, Index rows, Index cols);

}  // namespace avgnet
