#include "avgnet/trainer.hpp"

#include "avgnet/prox.hpp"

#include <algorithm>
#include <cmath>

namespace avgnet {
namespace {

// inputs[l][t] under the state's parameters.
std::vector<std::vector<Vec>> StateInputs(const TrainingProblem& problem,
                                          const TrainState& state) {
  if (state.mode == ThetaMode::kShared) return LayerInputs(problem, state.theta);
  const std::size_t L = problem.num_layers();
  std::vector<std::vector<Vec>> inputs(L);
  for (std::size_t t = 0; t < problem.samples.size(); ++t) {
    const NetworkSpec net = WithParams(problem.net_template, state.per_sample[t]);
    const auto ys = Forward(net, problem.samples[t].x);
    inputs[0].push_back(problem.samples[t].x);
    for (std::size_t l = 1; l < L; ++l) inputs[l].push_back(ys[l - 1]);
  }
  return inputs;
}

// Per-layer residual |F_l| and the weighted fit loss.
void Record(TrainState& state, const TrainingProblem& problem,
            const LayerTargets& targets) {
  const auto inputs = StateInputs(problem, state);
  const std::size_t L = problem.num_layers();
  double loss = 0.0;
  double grad2 = 0.0;
  state.layer_residual.assign(L, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    const auto w = LayerWeights(problem, l);
    const auto& act = problem.net_template.layers[l].activation;
    const auto& shape = problem.net_template.layers[l];
    LayerParams F{Mat::Zero(shape.W.rows(), shape.W.cols()), Vec::Zero(shape.b.size())};
    double per_sample2 = 0.0;
    for (std::size_t t = 0; t < problem.samples.size(); ++t) {
      const AffineLift A(inputs[l][t]);
      const Vec r = act.eval(A.Apply(state.ParamsFor(t)[l])) - targets.y[l][t];
      loss += w[t] * 0.5 * r.squaredNorm();
      const LayerParams term = w[t] * A.Adjoint(r);
      if (state.mode == ThetaMode::kShared) {
        F = F + term;
      } else {
        per_sample2 += Inner(term, term);
      }
    }
    const double res2 = state.mode == ThetaMode::kShared ? Inner(F, F) : per_sample2;
    state.layer_residual[l] = std::sqrt(res2);
    grad2 += res2;
  }
  state.objective.push_back(loss);
  state.grad_norm.push_back(std::sqrt(grad2));
}

void RequireGamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw InvalidInput("gradient step needs 0 < gamma < 1");
  }
}

const ProxPotential& DualPotential(const TrainingProblem& problem, std::size_t layer,
                                   ProxPotential& storage) {
  const auto& kind = problem.net_template.layers[layer].activation.kind;
  if (kind != "sigmoid" && kind != "softsign") {
    throw InvalidInput("dual objective is unavailable for activation '" + kind +
                       "' (needs a closed-form potential: sigmoid or softsign)");
  }
  storage = *PotentialFor(kind);
  return storage;
}

}  // namespace

const NetworkParams& TrainState::ParamsFor(std::size_t t) const {
  return mode == ThetaMode::kShared ? theta : per_sample.at(t);
}

TrainState InitialState(const TrainingProblem& problem, const LayerTargets& targets,
                        ThetaMode mode) {
  problem.Validate();
  TrainState state;
  state.mode = mode;
  state.theta = ParamsOf(problem.net_template);
  if (mode == ThetaMode::kPerSample) {
    state.per_sample.assign(problem.samples.size(), state.theta);
  }
  Record(state, problem, targets);
  return state;
}

void GdStep(TrainState& state, const TrainingProblem& problem,
            const LayerTargets& targets, std::size_t layer, double gamma) {
  RequireGamma(gamma);
  if (layer >= problem.num_layers()) throw InvalidInput("layer index out of range");
  const auto inputs = StateInputs(problem, state);
  const auto w = LayerWeights(problem, layer);
  const auto& act = problem.net_template.layers[layer].activation;

  if (state.mode == ThetaMode::kShared) {
    LayerParams& theta = state.theta[layer];
    LayerParams update{Mat::Zero(theta.W.rows(), theta.W.cols()),
                       Vec::Zero(theta.b.size())};
    for (std::size_t t = 0; t < problem.samples.size(); ++t) {
      const AffineLift A(inputs[layer][t]);
      const double norm = A.Norm();
      if (!(norm > 0.0)) throw InvalidInput("affine lift has zero norm");
      const Vec r = act.eval(A.Apply(theta)) - targets.y[layer][t];
      update = update + (w[t] * gamma / (2.0 * norm * norm)) * A.Adjoint(r);
    }
    theta = theta - update;
  } else {
    for (std::size_t t = 0; t < problem.samples.size(); ++t) {
      LayerParams& theta = state.per_sample[t][layer];
      const AffineLift A(inputs[layer][t]);
      const double norm = A.Norm();
      const Vec r = act.eval(A.Apply(theta)) - targets.y[layer][t];
      theta = theta - (gamma / (2.0 * norm * norm)) * A.Adjoint(r);
    }
  }
  ++state.step;
  Record(state, problem, targets);
}

TrainReport TrainFrom(TrainState& state, const TrainingProblem& problem,
                      const LayerTargets& targets, const TrainOptions& options) {
  RequireGamma(options.gamma);
  const std::size_t L = problem.num_layers();
  TrainReport report;
  report.target_source = targets.source;
  report.residual_curves.assign(L, {});
  auto done = [&] {
    return std::all_of(state.layer_residual.begin(), state.layer_residual.end(),
                       [&](double r) { return r <= options.tol; });
  };
  report.converged = done();
  while (!report.converged && report.sweeps < options.max_steps) {
    for (std::size_t l = 0; l < L; ++l) GdStep(state, problem, targets, l, options.gamma);
    ++report.sweeps;
    for (std::size_t l = 0; l < L; ++l) {
      report.residual_curves[l].push_back(state.layer_residual[l]);
    }
    report.converged = done();
  }
  report.final_vi_residual = state.layer_residual;

  const auto inputs = StateInputs(problem, state);
  for (std::size_t t = 0; t < problem.samples.size(); ++t) {
    const auto& params = state.ParamsFor(t);
    for (std::size_t l = 0; l < L; ++l) {
      const auto& act = problem.net_template.layers[l].activation;
      const Vec z = params[l].W * inputs[l][t] + params[l].b;
      report.fit_error =
          std::max(report.fit_error, (act.eval(z) - targets.y[l][t]).norm());
    }
    const NetworkSpec net = WithParams(problem.net_template, params);
    const Vec out = Forward(net, problem.samples[t].x).back();
    report.output_error =
        std::max(report.output_error, (out - problem.samples[t].y_L).norm());
  }
  report.exact_fit = report.fit_error <= options.fit_tol;
  return report;
}

TrainResult Train(const TrainingProblem& problem, const TrainOptions& options) {
  const LayerTargets targets = ResolveLayerTargets(problem);
  TrainResult result;
  result.state = InitialState(problem, targets, options.mode);
  result.report = TrainFrom(result.state, problem, targets, options);
  return result;
}

NetworkSpec TrainedNetwork(const TrainingProblem& problem, const TrainState& state) {
  if (state.mode != ThetaMode::kShared) {
    throw InvalidInput("per-sample training has no single trained network");
  }
  return WithParams(problem.net_template, state.theta);
}

double DualObjective(const TrainingProblem& problem, const LayerTargets& targets,
                     const NetworkParams& params, std::size_t layer) {
  if (layer >= problem.num_layers()) throw InvalidInput("layer index out of range");
  ProxPotential storage;
  const ProxPotential& f = DualPotential(problem, layer, storage);
  const auto inputs = LayerInputs(problem, params);
  const auto w = LayerWeights(problem, layer);
  double total = 0.0;
  for (std::size_t t = 0; t < problem.samples.size(); ++t) {
    const Vec z = AffineLift(inputs[layer][t]).Apply(params[layer]);
    double g = 0.0;
    for (Index i = 0; i < z.size(); ++i) g += ConjugateEval(f, z[i]);
    total += w[t] * (g - z.dot(targets.y[layer][t]));
  }
  return total;
}

LayerParams DualObjectiveFdGradient(const TrainingProblem& problem,
                                    const LayerTargets& targets,
                                    const NetworkParams& params, std::size_t layer,
                                    double h) {
  NetworkParams p = params;
  LayerParams grad{Mat::Zero(params[layer].W.rows(), params[layer].W.cols()),
                   Vec::Zero(params[layer].b.size())};
  auto diff = [&](double& entry) {
    const double saved = entry;
    entry = saved + h;
    const double up = DualObjective(problem, targets, p, layer);
    entry = saved - h;
    const double down = DualObjective(problem, targets, p, layer);
    entry = saved;
    return (up - down) / (2.0 * h);
  };
  for (Index j = 0; j < grad.W.cols(); ++j) {
    for (Index i = 0; i < grad.W.rows(); ++i) grad.W(i, j) = diff(p[layer].W(i, j));
  }
  for (Index i = 0; i < grad.b.size(); ++i) grad.b[i] = diff(p[layer].b[i]);
  return grad;
}

}  // namespace avgnet
