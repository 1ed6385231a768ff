#include "avgnet/network.hpp"

#include "avgnet/format.hpp"
#include "avgnet/rng.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace avgnet {

Vec LayerSpec::Apply(const Vec& x) const {
  if (x.size() != W.cols()) {
    throw InvalidInput("layer: expected input of dimension " +
                       std::to_string(W.cols()) + ", got " +
                       std::to_string(x.size()));
  }
  return activation.eval(W * x + b);
}

RelaxationSchedule RelaxationSchedule::Constant(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("relaxation parameter must be finite and >= 0");
  }
  RelaxationSchedule s;
  s.constant_ = lambda;
  return s;
}

RelaxationSchedule RelaxationSchedule::Custom(
    std::function<double(std::size_t)> fn) {
  if (!fn) throw InvalidInput("empty relaxation schedule");
  RelaxationSchedule s;
  s.fn_ = std::move(fn);
  return s;
}

double RelaxationSchedule::operator()(std::size_t t) const {
  return constant_ ? *constant_ : fn_(t);
}

void NetworkSpec::Validate() const {
  if (layers.empty()) throw InvalidInput("network has no layers");
  if (x0.size() < 1) throw InvalidInput("network input dimension must be >= 1");
  if (!x0.allFinite()) throw InvalidInput("x0 has non-finite entries");
  Index prev = x0.size();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const std::string where = "layer " + std::to_string(l + 1);
    if (layer.W.cols() != prev) {
      throw InvalidInput(where + ": W has " + std::to_string(layer.W.cols()) +
                         " columns, expected " + std::to_string(prev));
    }
    if (layer.b.size() != layer.W.rows()) {
      throw InvalidInput(where + ": b has dimension " +
                         std::to_string(layer.b.size()) + ", expected " +
                         std::to_string(layer.W.rows()));
    }
    if (!layer.W.allFinite() || !layer.b.allFinite()) {
      throw InvalidInput(where + ": non-finite parameters");
    }
    if (!layer.activation.eval) throw InvalidInput(where + ": no activation");
    if (layer.activation.arity == Arity::kReduce && layer.W.rows() != 1) {
      throw InvalidInput(where + ": activation '" + layer.activation.kind +
                         "' maps to R and needs a 1-dimensional layer");
    }
    prev = layer.W.rows();
  }
  if (prev != x0.size()) {
    throw InvalidInput("output dimension " + std::to_string(prev) +
                       " differs from input dimension " +
                       std::to_string(x0.size()));
  }
}

std::vector<Vec> Forward(const NetworkSpec& net, const Vec& x) {
  if (net.layers.empty()) throw InvalidInput("network has no layers");
  std::vector<Vec> ys;
  ys.reserve(net.layers.size());
  const Vec* prev = &x;
  for (const auto& layer : net.layers) {
    ys.push_back(layer.Apply(*prev));
    prev = &ys.back();
  }
  return ys;
}

VecMap NetworkMap(const NetworkSpec& net) {
  net.Validate();
  return [layers = net.layers](const Vec& x) {
    Vec y = x;
    for (const auto& layer : layers) y = layer.Apply(y);
    return y;
  };
}

double SpectralNorm(const Mat& W, double tol, int max_iter) {
  if (W.size() == 0) return 0.0;
  Rng rng = MakeRng(kDefaultSeed, "spectral_norm");
  Vec v = StandardNormal(rng, W.cols());
  v.normalize();
  double sigma2 = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vec u = W.transpose() * (W * v);
    const double next = u.norm();
    if (next == 0.0) return 0.0;
    v = u / next;
    if (std::abs(next - sigma2) <= tol * next) {
      sigma2 = next;
      break;
    }
    sigma2 = next;
  }
  return std::sqrt(sigma2);
}

NetworkCertificate CertifyNetwork(const NetworkSpec& net,
                                  const SamplingOptions& fallback) {
  net.Validate();
  NetworkCertificate out;
  bool all_certified = true;
  bool all_square = true;
  for (const auto& layer : net.layers) {
    out.weight_norms.push_back(SpectralNorm(layer.W));
    all_certified = all_certified && layer.activation.certified();
    all_square = all_square && layer.W.rows() == layer.W.cols();
  }

  if (all_certified) {
    double mu = 1.0;
    for (double n : out.weight_norms) mu *= n;
    if (mu < 1.0) out.promotion_gamma = (1.0 + mu) / 2.0;

    const bool nonexpansive_affine = std::all_of(
        out.weight_norms.begin(), out.weight_norms.end(),
        [](double n) { return n <= 1.0; });
    if (all_square && nonexpansive_affine) {
      std::vector<double> gammas;
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const double n = out.weight_norms[l];
        gammas.push_back(n < 1.0 ? (1.0 + n) / 2.0 : 1.0);
        gammas.push_back(net.layers[l].activation.certificate->gamma());
      }
      out.compose_gamma = ComposedGamma(gammas);
    }
  }

  if (out.compose_gamma || out.promotion_gamma) {
    const double c = out.compose_gamma.value_or(2.0);
    const double p = out.promotion_gamma.value_or(2.0);
    out.route = c <= p ? "compose" : "promotion";
    out.certificate = GammaCertificate::Derived(std::min(c, p));
    return out;
  }

  EstimateOptions eo;
  eo.samples = fallback.pairs;
  eo.seed = fallback.seed;
  eo.tol = fallback.tol;
  const Index n = net.dim();
  const auto est = EstimateGamma(NetworkMap(net), Vec::Constant(n, fallback.box_lo),
                                 Vec::Constant(n, fallback.box_hi), eo);
  if (est.certifiable()) {
    out.route = "estimate";
    out.certificate = est.certificate;
  } else {
    out.route = "none";
    out.note = "no certified route; sampled Lipschitz estimate " +
               FormatDouble(est.lipschitz);
  }
  return out;
}

std::string_view ToString(StopReason r) {
  switch (r) {
    case StopReason::kResidualTol:
      return "residual_tol";
    case StopReason::kMaxIter:
      return "max_iter";
    case StopReason::kDiverged:
      return "diverged";
  }
  return "unknown";
}

namespace {

void Warn(IterationTrace& trace, std::string msg) {
  spdlog::warn("{}", msg);
  trace.warnings.push_back(std::move(msg));
}

void CheckSchedule(IterationTrace& trace, double gamma,
                   const RelaxationSchedule& schedule, std::size_t horizon) {
  if (schedule.is_constant()) {
    const double l = *schedule.constant();
    if (l > 1.0 / gamma) {
      throw InvalidInput("lambda_0 = " + FormatDouble(l) + " exceeds 1/gamma = " +
                         FormatDouble(1.0 / gamma));
    }
    if (!(l * (1.0 - gamma * l) > 0.0)) {
      Warn(trace, "constant lambda = " + FormatDouble(l) +
                      " gives sum lambda(1 - gamma lambda) = 0; convergence is "
                      "not guaranteed");
    }
    return;
  }
  // Finite-horizon heuristic: the partial sums should keep growing.
  double first = 0.0;
  double second = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const double l = schedule(t);
    const double term = l * (1.0 - gamma * l);
    (t < horizon / 2 ? first : second) += term;
  }
  if (second < 1.0) {
    Warn(trace, "schedule partial sums of lambda(1 - gamma lambda) grow by " +
                    FormatDouble(second) +
                    " over the second half of the horizon; divergence of the "
                    "series is doubtful");
  }
}

}  // namespace

IterationTrace KmIterate(const VecMap& op, std::optional<double> gamma,
                         const Vec& x0, const RelaxationSchedule& schedule,
                         const KmOptions& options) {
  if (!x0.allFinite()) throw InvalidInput("x0 has non-finite entries");
  if (!(options.tol >= 0.0)) throw InvalidInput("tol must be >= 0");
  IterationTrace trace;
  trace.gamma = gamma;
  if (gamma) RequireGammaInRange(*gamma);
  const bool gated = gamma.has_value() && !options.unchecked;
  if (options.unchecked) {
    Warn(trace, "unchecked mode: relaxation parameters are not validated "
                "against a gamma certificate");
  } else if (!gamma) {
    throw InvalidInput("no gamma certificate for the iteration; use unchecked "
                       "mode to iterate anyway");
  }
  if (gated) CheckSchedule(trace, *gamma, schedule, options.max_iter);

  Vec x = x0;
  trace.iterates.push_back(x);
  for (std::size_t t = 0; t < options.max_iter; ++t) {
    const double lambda = schedule(t);
    if (!(lambda >= 0.0)) {
      throw InvalidInput("lambda_" + std::to_string(t) + " is negative");
    }
    if (gated && lambda > 1.0 / *gamma) {
      throw InvalidInput("lambda_" + std::to_string(t) + " = " +
                         FormatDouble(lambda) + " exceeds 1/gamma = " +
                         FormatDouble(1.0 / *gamma));
    }
    const Vec ox = op(x);
    if (ox.size() != x.size()) {
      throw InvalidInput("iteration map changes dimension");
    }
    if (!ox.allFinite()) {
      trace.stop_reason = StopReason::kDiverged;
      return trace;
    }
    const double residual = (ox - x).norm();
    trace.residuals.push_back(residual);
    trace.lambdas.push_back(lambda);
    x = x + lambda * (ox - x);
    trace.iterates.push_back(x);
    if (!x.allFinite()) {
      trace.stop_reason = StopReason::kDiverged;
      return trace;
    }
    if (residual <= options.tol) {
      trace.converged = true;
      trace.stop_reason = StopReason::kResidualTol;
      return trace;
    }
  }
  trace.stop_reason = StopReason::kMaxIter;
  return trace;
}

IterationTrace KmIterate(const NetworkSpec& net, const KmOptions& options) {
  const NetworkCertificate cert = CertifyNetwork(net, options.fallback);
  std::optional<double> gamma;
  if (cert.certificate) gamma = cert.certificate->gamma();
  RelaxationSchedule schedule = RelaxationSchedule::Constant(0.5);
  if (net.schedule) {
    schedule = *net.schedule;
  } else if (gamma) {
    schedule = RelaxationSchedule::Constant(std::min(1.0, 1.0 / (2.0 * *gamma)));
  }
  IterationTrace trace = KmIterate(NetworkMap(net), gamma, net.x0, schedule, options);
  if (!cert.note.empty()) trace.warnings.insert(trace.warnings.begin(), cert.note);
  if (trace.final_iterate().allFinite()) {
    trace.layer_outputs = Forward(net, trace.final_iterate());
  }
  return trace;
}

ContractionReport ContractionMode(const NetworkSpec& net, double tol,
                                  std::size_t max_iter, double rate_tol) {
  net.Validate();
  ContractionReport report;
  double max_norm = 0.0;
  report.rate_bound = 1.0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    if (!layer.activation.certified()) {
      throw InvalidInput("layer " + std::to_string(l + 1) + ": activation '" +
                         layer.activation.kind +
                         "' is not certified nonexpansive");
    }
    const double n = SpectralNorm(layer.W);
    report.weight_norms.push_back(n);
    max_norm = std::max(max_norm, n);
    report.rate_bound *= n;
  }
  if (!(max_norm < 1.0)) {
    std::string msg = "contraction mode needs max ||W_l|| < 1; norms:";
    for (double n : report.weight_norms) msg += " " + FormatDouble(n);
    throw InvalidInput(msg);
  }

  KmOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  const double gamma = (1.0 + report.rate_bound) / 2.0;
  report.trace = KmIterate(NetworkMap(net), gamma, net.x0,
                           RelaxationSchedule::Constant(1.0), opts);
  if (report.trace.final_iterate().allFinite()) {
    report.trace.layer_outputs = Forward(net, report.trace.final_iterate());
  }

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const auto& r = report.trace.residuals;
  report.rate_holds = true;
  for (std::size_t t = 0; t + 1 < r.size(); ++t) {
    const double floor =
        1e3 * kEps * std::max(1.0, report.trace.iterates[t].norm());
    if (r[t] <= floor) continue;
    const double ratio = r[t + 1] / r[t];
    report.ratios.push_back(ratio);
    report.worst_ratio = std::max(report.worst_ratio, ratio);
    if (ratio > report.rate_bound + rate_tol) report.rate_holds = false;
  }
  return report;
}

FejerReport FejerCheck(const IterationTrace& trace, const Vec& x_star,
                       const VecMap& op, double tol, double fixed_point_tol) {
  if (!trace.gamma) throw InvalidInput("FejerCheck: trace has no gamma");
  if (trace.iterates.empty()) throw InvalidInput("FejerCheck: empty trace");
  RequireSameDim(trace.iterates.front(), x_star, "FejerCheck");
  const double star_residual = (op(x_star) - x_star).norm();
  if (!(star_residual <= fixed_point_tol)) {
    throw InvalidInput("FejerCheck: x_star is not a fixed point (residual " +
                       FormatDouble(star_residual) + ")");
  }
  const double gamma = *trace.gamma;
  FejerReport report;
  for (const auto& x : trace.iterates) report.distances.push_back((x - x_star).norm());
  report.max_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t + 1 < report.distances.size(); ++t) {
    report.max_increase =
        std::max(report.max_increase, report.distances[t + 1] - report.distances[t]);
  }
  if (report.distances.size() < 2) report.max_increase = 0.0;
  report.monotone = report.max_increase <= tol;

  for (std::size_t t = 0; t < trace.residuals.size(); ++t) {
    const double eps = gamma * trace.lambdas[t];
    const double gap = trace.residuals[t] / gamma;
    report.telescoping_sum += eps * (1.0 - eps) * gap * gap;
  }
  report.bound = report.distances.front() * report.distances.front();
  report.telescoping_holds = report.telescoping_sum <= report.bound + tol;
  return report;
}

std::string TraceToCsv(const IterationTrace& trace, const std::optional<Vec>& x_star) {
  std::ostringstream os;
  os << (x_star ? "t,residual,distance_to_xstar\n" : "t,residual\n");
  for (std::size_t t = 0; t < trace.residuals.size(); ++t) {
    os << t << ',' << FormatDouble(trace.residuals[t]);
    if (x_star) os << ',' << FormatDouble((trace.iterates[t] - *x_star).norm());
    os << '\n';
  }
  return os.str();
}

}  // namespace avgnet
