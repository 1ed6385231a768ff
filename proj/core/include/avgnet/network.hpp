#pragma once

#include "avgnet/activations.hpp"
#include "avgnet/operator_core.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace avgnet {

struct LayerSpec {
  Mat W;  // n_l x n_{l-1}
  Vec b;  // n_l
  ActivationSpec activation;

  Index in_dim() const { return W.cols(); }
  Index out_dim() const { return W.rows(); }
  // r(W x + b)
  Vec Apply(const Vec& x) const;
};

/// Relaxation schedule t -> lambda_t >= 0.
class RelaxationSchedule {
 public:
  static RelaxationSchedule Constant(double lambda);
  static RelaxationSchedule Custom(std::function<double(std::size_t)> fn);

  double operator()(std::size_t t) const;
  bool is_constant() const { return constant_.has_value(); }
  std::optional<double> constant() const { return constant_; }

 private:
  std::optional<double> constant_;
  std::function<double(std::size_t)> fn_;
};

struct NetworkSpec {
  Vec x0;
  std::vector<LayerSpec> layers;
  std::optional<RelaxationSchedule> schedule;  // default: min(1, 1/(2 gamma))

  Index dim() const { return x0.size(); }
  // Throws InvalidInput if dimensions do not chain or n_L != n_0.
  void Validate() const;
};

// y_l = r_l(W_l y_{l-1} + b_l), y_0 = x; returns y_1 ... y_L.
std::vector<Vec> Forward(const NetworkSpec& net, const Vec& x);

// x -> y_L.
VecMap NetworkMap(const NetworkSpec& net);

// Operator norm by power iteration on W^T W.
double SpectralNorm(const Mat& W, double tol = 1e-13, int max_iter = 10000);

struct NetworkCertificate {
  std::optional<GammaCertificate> certificate;  // empty: not certifiable
  std::string route;  // "compose", "promotion", "estimate" or "none"
  std::optional<double> compose_gamma;
  std::optional<double> promotion_gamma;
  std::vector<double> weight_norms;
  std::string note;
};

/// End-to-end gamma of x -> y_L.
///
/// Takes the smaller of two certified routes: composition of per-layer
/// certificates (square layers only) and Lipschitz promotion with
/// mu = prod ||W_l|| (requires certified, hence nonexpansive, activations).
/// Falls back to a sampled estimate on `fallback` when neither applies.
NetworkCertificate CertifyNetwork(const NetworkSpec& net,
                                  const SamplingOptions& fallback = {});

enum class StopReason { kResidualTol, kMaxIter, kDiverged };

std::string_view ToString(StopReason r);

struct IterationTrace {
  std::vector<Vec> iterates;
  std::vector<double> residuals;  // |O(x_t) - x_t|, one per iterate but the last
  std::vector<double> lambdas;
  std::vector<Vec> layer_outputs;  // y_1..y_L at the final iterate
  std::optional<double> gamma;
  bool converged = false;
  StopReason stop_reason = StopReason::kMaxIter;
  std::vector<std::string> warnings;

  const Vec& final_iterate() const { return iterates.back(); }
};

struct KmOptions {
  double tol = 1e-8;
  std::size_t max_iter = 100000;
  // Skip the lambda_t <= 1/gamma gate (and allow gamma to be unknown).
  bool unchecked = false;
  // Network form only: sampling used if certification falls back to an
  // estimate.
  SamplingOptions fallback;
};

/// x_{t+1} = x_t + lambda_t (O(x_t) - x_t).
///
/// With a gamma, lambda_t > 1/gamma is rejected naming the offending t. The
/// divergence condition sum lambda_t (1 - gamma lambda_t) = inf is checked
/// exactly for constant schedules and by a finite-horizon heuristic
/// otherwise; failures only warn. A residual <= tol stops the loop after the
/// step from that iterate is taken.
IterationTrace KmIterate(const VecMap& op, std::optional<double> gamma,
                         const Vec& x0, const RelaxationSchedule& schedule,
                         const KmOptions& options = {});

// Network form: certifies the network, applies the default schedule when
// none is set and records layer outputs at the final iterate.
IterationTrace KmIterate(const NetworkSpec& net, const KmOptions& options = {});

struct ContractionReport {
  IterationTrace trace;
  std::vector<double> weight_norms;
  double rate_bound = 0.0;           // prod ||W_l||
  std::vector<double> ratios;        // residual_{t+1} / residual_t
  double worst_ratio = 0.0;
  bool rate_holds = false;
};

/// Banach-Picard mode: lambda = 1, requires certified activations and
/// max ||W_l|| < 1. Ratios are only taken where residual_t is above the
/// rounding floor (1e3 * eps * max(1, |x_t|)).
ContractionReport ContractionMode(const NetworkSpec& net, double tol = 1e-8,
                                  std::size_t max_iter = 100000,
                                  double rate_tol = 1e-9);

struct FejerReport {
  std::vector<double> distances;  // |x_t - x*|
  double max_increase = 0.0;      // max_t d_{t+1} - d_t
  bool monotone = false;
  double telescoping_sum = 0.0;   // sum eps_t (1 - eps_t) |x_t - T(x_t)|^2
  double bound = 0.0;             // |x_0 - x*|^2
  bool telescoping_holds = false;
};

/// Fejer diagnostics of a trace against a fixed point x_star.
///
/// T = Id + (O - Id)/gamma is the nonexpansive map behind O, and
/// eps_t = gamma * lambda_t. Rejects x_star whose residual exceeds
/// fixed_point_tol.
FejerReport FejerCheck(const IterationTrace& trace, const Vec& x_star,
                       const VecMap& op, double tol,
                       double fixed_point_tol = 1e-8);

std::string TraceToCsv(const IterationTrace& trace,
                       const std::optional<Vec>& x_star = std::nullopt);

}  // namespace avgnet
