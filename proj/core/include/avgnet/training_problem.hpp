#pragma once

#include "avgnet/network.hpp"

#include <optional>
#include <string>
#include <vector>

namespace avgnet {

struct LayerParams {
  Mat W;
  Vec b;
};

// Per-layer (W, b) of a whole network.
using NetworkParams = std::vector<LayerParams>;

// Frobenius inner product on (W, b) pairs.
double Inner(const LayerParams& a, const LayerParams& b);
double Norm(const LayerParams& p);
LayerParams operator+(const LayerParams& a, const LayerParams& b);
LayerParams operator-(const LayerParams& a, const LayerParams& b);
LayerParams operator*(double s, const LayerParams& p);

NetworkParams ParamsOf(const NetworkSpec& net);
NetworkSpec WithParams(const NetworkSpec& net, const NetworkParams& params);

/// A_{l,t}: (W, b) -> W x + b for a fixed layer input x.
class AffineLift {
 public:
  explicit AffineLift(Vec x_input);

  Vec Apply(const LayerParams& theta) const;
  // z -> (z x^T, z)
  LayerParams Adjoint(const Vec& z) const;
  // Exact operator norm sqrt(|x|^2 + 1).
  double Norm() const;
  const Vec& input() const { return x_; }

 private:
  Vec x_;
};

struct Sample {
  Vec x;
  std::optional<std::vector<Vec>> y_layers;  // y_1 .. y_L when available
  Vec y_L;
};

struct TrainingProblem {
  std::vector<Sample> samples;
  // omega[l][t] > 0, summing to 1 over t; empty means uniform 1/T.
  std::vector<std::vector<double>> omega;
  NetworkSpec net_template;  // activations fixed, (W, b) are the start point
  std::optional<NetworkSpec> teacher;

  std::size_t num_layers() const { return net_template.layers.size(); }
  // Throws InvalidInput on dimension mismatch, T = 0 or invalid weights.
  void Validate() const;
};

enum class TargetSource { kGiven, kTeacher };

std::string_view ToString(TargetSource s);

struct LayerTargets {
  std::vector<std::vector<Vec>> y;  // y[l][t]
  TargetSource source = TargetSource::kGiven;
};

/// Per-layer targets: explicit per-layer data when every sample has it,
/// otherwise teacher forward passes. Final-layer-only data without a teacher
/// is rejected.
LayerTargets ResolveLayerTargets(const TrainingProblem& problem);

// omega[l] with the uniform default applied (logged once per call).
std::vector<double> LayerWeights(const TrainingProblem& problem, std::size_t layer);

// Layer inputs x_{l-1,t} for all t under the given parameters (forward passes
// of the template network with those parameters).
std::vector<std::vector<Vec>> LayerInputs(const TrainingProblem& problem,
                                          const NetworkParams& params);

// Weighted fit loss sum_l sum_t omega_{l,t} |r_l(A_{l,t} theta_l) - y_{l,t}|^2 / 2.
double FitLoss(const TrainingProblem& problem, const LayerTargets& targets,
               const NetworkParams& params);

}  // namespace avgnet
