#include "avgnet/training_problem.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

namespace avgnet {

double Inner(const LayerParams& a, const LayerParams& b) {
  return (a.W.array() * b.W.array()).sum() + a.b.dot(b.b);
}

double Norm(const LayerParams& p) { return std::sqrt(Inner(p, p)); }

LayerParams operator+(const LayerParams& a, const LayerParams& b) {
  return {a.W + b.W, a.b + b.b};
}

LayerParams operator-(const LayerParams& a, const LayerParams& b) {
  return {a.W - b.W, a.b - b.b};
}

LayerParams operator*(double s, const LayerParams& p) { return {s * p.W, s * p.b}; }

NetworkParams ParamsOf(const NetworkSpec& net) {
  NetworkParams out;
  for (const auto& layer : net.layers) out.push_back({layer.W, layer.b});
  return out;
}

NetworkSpec WithParams(const NetworkSpec& net, const NetworkParams& params) {
  if (params.size() != net.layers.size()) {
    throw InvalidInput("parameter count does not match the number of layers");
  }
  NetworkSpec out = net;
  for (std::size_t l = 0; l < params.size(); ++l) {
    const auto& p = params[l];
    auto& layer = out.layers[l];
    if (p.W.rows() != layer.W.rows() || p.W.cols() != layer.W.cols() ||
        p.b.size() != layer.b.size()) {
      throw InvalidInput("layer " + std::to_string(l + 1) +
                         ": parameter shape mismatch");
    }
    layer.W = p.W;
    layer.b = p.b;
  }
  return out;
}

AffineLift::AffineLift(Vec x_input) : x_(std::move(x_input)) {}

Vec AffineLift::Apply(const LayerParams& theta) const {
  if (theta.W.cols() != x_.size()) throw InvalidInput("AffineLift: shape mismatch");
  return theta.W * x_ + theta.b;
}

LayerParams AffineLift::Adjoint(const Vec& z) const {
  return {z * x_.transpose(), z};
}

double AffineLift::Norm() const { return std::sqrt(x_.squaredNorm() + 1.0); }

void TrainingProblem::Validate() const {
  net_template.Validate();
  if (samples.empty()) throw InvalidInput("training problem has no samples");
  const std::size_t L = num_layers();
  const Index n0 = net_template.layers.front().in_dim();
  const Index nL = net_template.layers.back().out_dim();
  for (std::size_t t = 0; t < samples.size(); ++t) {
    const auto& s = samples[t];
    const std::string where = "sample " + std::to_string(t);
    if (s.x.size() != n0) throw InvalidInput(where + ": x has wrong dimension");
    if (s.y_L.size() != nL) throw InvalidInput(where + ": y_L has wrong dimension");
    if (s.y_layers) {
      if (s.y_layers->size() != L) {
        throw InvalidInput(where + ": y_layers needs one target per layer");
      }
      for (std::size_t l = 0; l < L; ++l) {
        if ((*s.y_layers)[l].size() != net_template.layers[l].out_dim()) {
          throw InvalidInput(where + ": target for layer " +
                             std::to_string(l + 1) + " has wrong dimension");
        }
      }
    }
  }
  if (!omega.empty()) {
    if (omega.size() != L) throw InvalidInput("omega needs one row per layer");
    for (std::size_t l = 0; l < L; ++l) {
      if (omega[l].size() != samples.size()) {
        throw InvalidInput("omega row " + std::to_string(l + 1) +
                           " needs one weight per sample");
      }
      double sum = 0.0;
      for (double w : omega[l]) {
        if (!(w > 0.0)) throw InvalidInput("omega weights must be > 0");
        sum += w;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        throw InvalidInput("omega row " + std::to_string(l + 1) +
                           " does not sum to 1");
      }
    }
  }
  if (teacher) {
    teacher->Validate();
    if (teacher->layers.size() != L) {
      throw InvalidInput("teacher must have the same number of layers");
    }
  }
}

std::string_view ToString(TargetSource s) {
  return s == TargetSource::kGiven ? "given" : "teacher";
}

LayerTargets ResolveLayerTargets(const TrainingProblem& problem) {
  problem.Validate();
  const std::size_t L = problem.num_layers();
  LayerTargets out;
  out.y.assign(L, {});
  bool all_given = true;
  for (const auto& s : problem.samples) all_given = all_given && s.y_layers.has_value();
  if (all_given) {
    out.source = TargetSource::kGiven;
    for (const auto& s : problem.samples) {
      for (std::size_t l = 0; l < L; ++l) out.y[l].push_back((*s.y_layers)[l]);
    }
    return out;
  }
  if (!problem.teacher) {
    throw InvalidInput(
        "per-layer targets are missing and no teacher network is supplied; "
        "final-layer data alone does not determine the layer targets");
  }
  out.source = TargetSource::kTeacher;
  for (const auto& s : problem.samples) {
    const auto ys = Forward(*problem.teacher, s.x);
    for (std::size_t l = 0; l < L; ++l) out.y[l].push_back(ys[l]);
  }
  return out;
}

std::vector<double> LayerWeights(const TrainingProblem& problem, std::size_t layer) {
  if (layer >= problem.num_layers()) throw InvalidInput("layer index out of range");
  if (!problem.omega.empty()) return problem.omega[layer];
  spdlog::debug("omega not given for layer {}; using uniform 1/T", layer + 1);
  const double w = 1.0 / static_cast<double>(problem.samples.size());
  return std::vector<double>(problem.samples.size(), w);
}

std::vector<std::vector<Vec>> LayerInputs(const TrainingProblem& problem,
                                          const NetworkParams& params) {
  const NetworkSpec net = WithParams(problem.net_template, params);
  const std::size_t L = net.layers.size();
  std::vector<std::vector<Vec>> inputs(L);
  for (const auto& s : problem.samples) {
    const auto ys = Forward(net, s.x);
    inputs[0].push_back(s.x);
    for (std::size_t l = 1; l < L; ++l) inputs[l].push_back(ys[l - 1]);
  }
  return inputs;
}

double FitLoss(const TrainingProblem& problem, const LayerTargets& targets,
               const NetworkParams& params) {
  const auto inputs = LayerInputs(problem, params);
  double loss = 0.0;
  for (std::size_t l = 0; l < problem.num_layers(); ++l) {
    const auto w = LayerWeights(problem, l);
    const auto& act = problem.net_template.layers[l].activation;
    for (std::size_t t = 0; t < problem.samples.size(); ++t) {
      const Vec z = params[l].W * inputs[l][t] + params[l].b;
      loss += w[t] * 0.5 * (act.eval(z) - targets.y[l][t]).squaredNorm();
    }
  }
  return loss;
}

}  // namespace avgnet
