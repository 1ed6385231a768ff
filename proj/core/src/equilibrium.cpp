#include "avgnet/equilibrium.hpp"

#include "avgnet/prox.hpp"
#include "avgnet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace avgnet {
namespace {

constexpr double kScales[] = {1e-3, 1e-1, 1.0};

double LayerObjective(const ProxPotential& f, const Vec& y, const Vec& z) {
  double value = 0.5 * (y - z).squaredNorm();
  for (Index i = 0; i < y.size(); ++i) value += f(y[i]);
  return value;
}

void CheckState(const NetworkSpec& net, const LayerGameState& state) {
  net.Validate();
  if (state.x_star.size() != net.layers.size()) {
    throw InvalidInput("state needs one vector per layer");
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (state.x_star[l].size() != net.layers[l].out_dim()) {
      throw InvalidInput("state of layer " + std::to_string(l + 1) +
                         " has wrong dimension");
    }
  }
}

}  // namespace

LayerGameState StateFromTrace(const IterationTrace& trace) {
  if (trace.layer_outputs.empty()) {
    throw InvalidInput("trace carries no layer outputs");
  }
  return {trace.layer_outputs};
}

NashReport VerifyNash(const NetworkSpec& net, const LayerGameState& state,
                      const NashOptions& options) {
  CheckState(net, state);
  const std::size_t L = net.layers.size();
  NashReport report;
  report.deviation_samples = options.deviation_samples;
  report.best_improvement = -std::numeric_limits<double>::infinity();
  bool ok = true;
  bool any_deviation = false;

  for (std::size_t l = 0; l < L; ++l) {
    const auto& layer = net.layers[l];
    const Vec& input = state.x_star[(l + L - 1) % L];
    const Vec& y = state.x_star[l];
    const Vec z = layer.W * input + layer.b;

    LayerNashCheck check;
    check.residual = (y - layer.activation.eval(z)).norm();
    ok = ok && check.residual <= options.tol;

    const auto f = layer.activation.arity == Arity::kElementwise
                       ? PotentialFor(layer.activation.kind)
                       : std::nullopt;
    if (f) {
      check.prox_form_skipped = false;
      double gap = 0.0;
      for (Index i = 0; i < z.size(); ++i) {
        gap = std::max(gap, std::abs(ProxEval(*f, z[i]) - y[i]));
      }
      check.prox_gap = gap;
      ok = ok && gap <= options.prox_tol;

      Rng rng = MakeRng(options.seed, "nash_deviation/" + std::to_string(l + 1));
      const double base = LayerObjective(*f, y, z);
      DeviationTest dev;
      dev.samples = options.deviation_samples;
      dev.best_improvement = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < options.deviation_samples; ++k) {
        const Vec cand = y + kScales[k % 3] * StandardNormal(rng, y.size());
        dev.best_improvement =
            std::max(dev.best_improvement, base - LayerObjective(*f, cand, z));
      }
      ok = ok && dev.best_improvement <= options.tol;
      report.best_improvement = std::max(report.best_improvement, dev.best_improvement);
      any_deviation = true;
      check.deviation = dev;
    }
    report.per_layer_residual.push_back(check.residual);
    report.layers.push_back(check);
  }
  if (!any_deviation) report.best_improvement = 0.0;
  report.is_equilibrium = ok;
  return report;
}

LayerGameState BestResponseSweep(const NetworkSpec& net, const LayerGameState& state) {
  CheckState(net, state);
  LayerGameState next = state;
  const std::size_t L = net.layers.size();
  for (std::size_t l = 0; l < L; ++l) {
    const Vec& input = next.x_star[(l + L - 1) % L];
    next.x_star[l] = net.layers[l].Apply(input);
  }
  return next;
}

PocsReport PocsDemo(const std::vector<ConvexSet>& sets, const Vec& x0,
                    const Vec& witness, const PocsOptions& options) {
  if (sets.size() < 3) throw InvalidInput("POCS demo needs at least 3 sets");
  const Index n = sets.front().dim();
  for (const auto& s : sets) {
    if (s.dim() != n) throw InvalidInput("POCS sets must share one space");
  }
  if (x0.size() != n || witness.size() != n) {
    throw InvalidInput("POCS: x0/witness dimension mismatch");
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (!sets[i].Contains(witness, 1e-12)) {
      throw InvalidInput("POCS: witness is not in set " + std::to_string(i + 1) +
                         "; the intersection may be empty");
    }
  }

  std::vector<AveragedOperator> chain;  // outermost first
  for (auto it = sets.rbegin(); it != sets.rend(); ++it) chain.push_back(it->AsOperator());
  const AveragedOperator cyclic = Compose(chain);

  KmOptions km;
  km.tol = options.tol;
  km.max_iter = options.max_iter;
  PocsReport report;
  report.trace = KmIterate(cyclic.map(), cyclic.gamma(), x0,
                           RelaxationSchedule::Constant(options.lambda), km);
  report.limit = report.trace.final_iterate();
  report.all_members = true;
  for (const auto& s : sets) {
    report.violations.push_back(s.Violation(report.limit));
    report.all_members =
        report.all_members && s.Contains(report.limit, options.membership_tol);
  }

  Rng rng = MakeRng(options.seed, "pocs_players");
  std::vector<Vec> probes;
  for (int k = 0; k < 100; ++k) probes.push_back(report.limit + StandardNormal(rng, n));
  report.players_distinct = true;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      double gap = 0.0;
      for (const auto& z : probes) {
        gap = std::max(gap, (sets[i].Project(z) - sets[j].Project(z)).norm());
      }
      report.pairwise_projection_gap.push_back(gap);
      report.players_distinct = report.players_distinct && gap > 0.0;
    }
  }
  return report;
}

LayerParams ViOperator(const TrainingProblem& problem, const LayerTargets& targets,
                       const NetworkParams& params, std::size_t layer) {
  if (layer >= problem.num_layers()) throw InvalidInput("layer index out of range");
  const auto inputs = LayerInputs(problem, params);
  const auto w = LayerWeights(problem, layer);
  const auto& act = problem.net_template.layers[layer].activation;
  const LayerParams& theta = params[layer];
  LayerParams F{Mat::Zero(theta.W.rows(), theta.W.cols()), Vec::Zero(theta.b.size())};
  for (std::size_t t = 0; t < problem.samples.size(); ++t) {
    const AffineLift A(inputs[layer][t]);
    const Vec r = act.eval(A.Apply(theta)) - targets.y[layer][t];
    F = F + w[t] * A.Adjoint(r);
  }
  return F;
}

double ViResidual(const TrainingProblem& problem, const LayerTargets& targets,
                  const NetworkParams& params, std::size_t layer) {
  return Norm(ViOperator(problem, targets, params, layer));
}

double ViResidual(const TrainingProblem& problem, const NetworkParams& params,
                  std::size_t layer) {
  return ViResidual(problem, ResolveLayerTargets(problem), params, layer);
}

ViDirectionalReport ViDirectionalCheck(const TrainingProblem& problem,
                                       const LayerTargets& targets,
                                       const NetworkParams& params,
                                       std::size_t layer, std::size_t directions,
                                       std::uint64_t seed, double tol) {
  const LayerParams F = ViOperator(problem, targets, params, layer);
  Rng rng = MakeRng(seed, "vi_directions/" + std::to_string(layer + 1));
  ViDirectionalReport report;
  report.directions = directions;
  report.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < directions; ++k) {
    LayerParams d{StandardNormal(rng, F.W.rows(), F.W.cols()),
                  StandardNormal(rng, F.b.size())};
    d = (1.0 / Norm(d)) * d;
    report.min_value = std::min(report.min_value, Inner(F, d));
  }
  report.pass = report.min_value >= -tol;
  return report;
}

}  // namespace avgnet
