#pragma once

#include "avgnet/equilibrium.hpp"
#include "avgnet/training_problem.hpp"

#include <vector>

namespace avgnet {

// kShared: one (W_l, b_l) fitted against all samples with weights omega.
// kPerSample: an independent (W_{l,t}, b_{l,t}) per sample.
enum class ThetaMode { kShared, kPerSample };

struct TrainState {
  NetworkParams theta;                  // kShared
  std::vector<NetworkParams> per_sample;  // kPerSample, indexed by t
  ThetaMode mode = ThetaMode::kShared;
  std::size_t step = 0;  // number of gd_step calls
  std::vector<double> objective;  // weighted fit loss, length step + 1
  std::vector<double> grad_norm;  // sqrt(sum_l |F_l|^2), length step + 1
  std::vector<double> layer_residual;  // |F_l| at the latest record

  // Parameters used for sample t.
  const NetworkParams& ParamsFor(std::size_t t) const;
};

TrainState InitialState(const TrainingProblem& problem, const LayerTargets& targets,
                        ThetaMode mode = ThetaMode::kShared);

/// theta_l <- theta_l - sum_t omega_{l,t} gamma / (2 |A_{l,t}|^2)
///                      A_{l,t}^T [r_l(A_{l,t} theta_l) - y_{l,t}]
/// (per-sample mode drops the sum and the weights). Appends the objective and
/// gradient norm after the step.
void GdStep(TrainState& state, const TrainingProblem& problem,
            const LayerTargets& targets, std::size_t layer, double gamma);

struct TrainOptions {
  double gamma = 0.5;
  double tol = 1e-8;            // stop when every layer's VI residual <= tol
  std::size_t max_steps = 100000;  // sweeps over the layers (l = 1..L each)
  ThetaMode mode = ThetaMode::kShared;
  double fit_tol = 1e-6;        // exact-fit threshold on |r(A theta) - y|
};

struct TrainReport {
  TargetSource target_source = TargetSource::kGiven;
  std::size_t sweeps = 0;
  bool converged = false;
  std::vector<double> final_vi_residual;  // per layer
  std::vector<std::vector<double>> residual_curves;  // [l][sweep]
  double fit_error = 0.0;     // max_{l,t} |r_l(A_{l,t} theta_l) - y_{l,t}|
  double output_error = 0.0;  // max_t |y_L(x_t) - y_{L,t}| of the full forward pass
  bool exact_fit = false;
};

struct TrainResult {
  TrainState state;
  TrainReport report;
};

TrainResult Train(const TrainingProblem& problem, const TrainOptions& options = {});

// Continue training from an existing state (federated clients use this).
TrainReport TrainFrom(TrainState& state, const TrainingProblem& problem,
                      const LayerTargets& targets, const TrainOptions& options);

// Network with the trained parameters (shared mode only).
NetworkSpec TrainedNetwork(const TrainingProblem& problem, const TrainState& state);

/// sum_t omega_{l,t} [sum_i g(z_i) - <z, y_{l,t}>], z = A_{l,t} theta_l, with
/// g = (|.|^2/2 + f)* computed numerically. Available for sigmoid and
/// softsign layers only (InvalidInput otherwise).
double DualObjective(const TrainingProblem& problem, const LayerTargets& targets,
                     const NetworkParams& params, std::size_t layer);

// Central differences of DualObjective over the entries of (W_l, b_l).
LayerParams DualObjectiveFdGradient(const TrainingProblem& problem,
                                    const LayerTargets& targets,
                                    const NetworkParams& params, std::size_t layer,
                                    double h = 1e-5);

}  // namespace avgnet
