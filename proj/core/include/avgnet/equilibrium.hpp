#pragma once

#include "avgnet/convex_sets.hpp"
#include "avgnet/network.hpp"
#include "avgnet/training_problem.hpp"

#include <optional>
#include <vector>

namespace avgnet {

// Joint layer outputs x*_1 .. x*_L; the input of layer 1 is x*_L.
struct LayerGameState {
  std::vector<Vec> x_star;
};

LayerGameState StateFromTrace(const IterationTrace& trace);

struct DeviationTest {
  std::size_t samples = 0;
  double best_improvement = 0.0;  // max over deviations of J(x*) - J(y)
};

struct LayerNashCheck {
  double residual = 0.0;  // |x*_l - r_l(W_l x*_{l-1} + b_l)|
  // Prox-form check, only where the layer potential is known.
  bool prox_form_skipped = true;
  std::optional<double> prox_gap;  // |x*_l - argmin J_l| via 1-D search
  std::optional<DeviationTest> deviation;
};

struct NashReport {
  std::vector<LayerNashCheck> layers;
  std::vector<double> per_layer_residual;
  std::size_t deviation_samples = 0;
  double best_improvement = 0.0;  // over layers where the test ran
  bool is_equilibrium = false;
};

struct NashOptions {
  double tol = 1e-8;
  double prox_tol = 1e-6;
  std::size_t deviation_samples = 1000;
  std::uint64_t seed = kDefaultSeed;
};

/// Checks that no layer can improve J_l(y) = sum_i f_l(y_i) + |y - W_l x*_{l-1}
/// - b_l|^2 / 2 by deviating alone.
///
/// Every layer gets the fixed-point residual. Layers whose potential f_l is
/// known (identity, sigmoid, softsign) also get an independent argmin search
/// and a sampled deviation test at scales 1e-3, 1e-1 and 1.
NashReport VerifyNash(const NetworkSpec& net, const LayerGameState& state,
                      const NashOptions& options = {});

// One Gauss-Seidel best-response sweep: x_l <- r_l(W_l x_{l-1} + b_l) for
// l = 1..L, starting from x_0 = x*_L.
LayerGameState BestResponseSweep(const NetworkSpec& net, const LayerGameState& state);

struct PocsOptions {
  double tol = 1e-12;  // residual tolerance of the cyclic projection map
  std::size_t max_iter = 100000;
  double lambda = 1.0;
  double membership_tol = 1e-8;
  std::uint64_t seed = kDefaultSeed;
};

struct PocsReport {
  IterationTrace trace;
  Vec limit;
  std::vector<double> violations;  // per set, by the membership predicate
  bool all_members = false;
  // max |P_i(z) - P_j(z)| over points z sampled near the limit, per pair
  // (i < j) in row-major order.
  std::vector<double> pairwise_projection_gap;
  bool players_distinct = false;
};

/// Cyclic projections x -> P_L(... P_1(x)) iterated with KM.
///
/// The sets must have a common point; `witness` must lie in every set
/// (checked by the predicates), otherwise the construction is rejected.
PocsReport PocsDemo(const std::vector<ConvexSet>& sets, const Vec& x0,
                    const Vec& witness, const PocsOptions& options = {});

/// F_l(theta) = sum_t omega_{l,t} A_{l,t}^T [r_l(A_{l,t} theta_l) - y_{l,t}],
/// with layer inputs from forward passes under `params`.
LayerParams ViOperator(const TrainingProblem& problem, const LayerTargets& targets,
                       const NetworkParams& params, std::size_t layer);

double ViResidual(const TrainingProblem& problem, const LayerTargets& targets,
                  const NetworkParams& params, std::size_t layer);
// Resolves the targets first.
double ViResidual(const TrainingProblem& problem, const NetworkParams& params,
                  std::size_t layer);

struct ViDirectionalReport {
  std::size_t directions = 0;
  double min_value = 0.0;  // min over unit directions d of <F(theta*), d>
  bool pass = false;
};

ViDirectionalReport ViDirectionalCheck(const TrainingProblem& problem,
                                       const LayerTargets& targets,
                                       const NetworkParams& params,
                                       std::size_t layer, std::size_t directions,
                                       std::uint64_t seed, double tol);

}  // namespace avgnet
