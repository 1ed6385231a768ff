#pragma once

#include <avgnet/federated.hpp>
#include <avgnet/network.hpp>
#include <avgnet/trainer.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace avgnet::testing {

// Square random matrix rescaled to the given spectral norm.
Mat RandomMatrixWithNorm(Rng& rng, Index rows, Index cols, double norm);

/// Random certified network: 1..4 layers, widths <= 8, n_L = n_0, spectral
/// norms in [norm_lo, norm_hi], bounded last activation. `index` picks the
/// fixture; the same (seed, index) always gives the same network.
NetworkSpec RandomCertifiedNetwork(std::uint64_t seed, std::size_t index,
                                   double norm_lo = 0.5, double norm_hi = 1.0);

// Network whose activations all have a known prox potential (identity,
// sigmoid, softsign), for the deviation test.
NetworkSpec RandomPotentialNetwork(std::uint64_t seed, std::size_t index);

// Continues KM from the trace's last iterate until the residual stops
// improving; returns a fixed point accurate to rounding.
Vec PolishFixedPoint(const NetworkSpec& net, const IterationTrace& trace);

// Teacher network with the given activation and per-layer widths (square).
NetworkSpec TeacherNetwork(std::uint64_t seed, Index dim, std::size_t layers,
                           const std::string& activation, double scale);

// Samples with final-layer targets from the teacher; x uniform in [-1, 1]^d.
std::vector<Sample> TeacherSamples(const NetworkSpec& teacher, std::size_t count,
                                   std::uint64_t seed, const std::string& consumer);

// Student: same activations as the teacher, zero parameters.
NetworkSpec ZeroStudent(const NetworkSpec& teacher);

}  // namespace avgnet::testing
