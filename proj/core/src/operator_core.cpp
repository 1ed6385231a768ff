#include "avgnet/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace avgnet {

std::string_view ToString(Provenance p) {
  switch (p) {
    case Provenance::kClosedForm:
      return "closed_form";
    case Provenance::kDerivedFormula:
      return "derived_formula";
    case Provenance::kNumericEstimate:
      return "numeric_estimate";
  }
  return "unknown";
}

void RequireGammaInRange(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw InvalidInput("gamma must lie in (0, 1], got " +
                       std::to_string(gamma));
  }
}

GammaCertificate::GammaCertificate(double gamma, Provenance p,
                                   std::optional<EstimateInfo> e)
    : gamma_(gamma), provenance_(p), estimate_(std::move(e)) {
  RequireGammaInRange(gamma);
}

GammaCertificate GammaCertificate::ClosedForm(double gamma) {
  return GammaCertificate(gamma, Provenance::kClosedForm, std::nullopt);
}

GammaCertificate GammaCertificate::Derived(double gamma) {
  return GammaCertificate(gamma, Provenance::kDerivedFormula, std::nullopt);
}

GammaCertificate GammaCertificate::Numeric(double gamma, EstimateInfo info) {
  return GammaCertificate(gamma, Provenance::kNumericEstimate, info);
}

AveragedOperator::AveragedOperator(std::string label, Index in_dim,
                                   Index out_dim, VecMap eval,
                                   GammaCertificate cert)
    : label_(std::move(label)),
      in_dim_(in_dim),
      out_dim_(out_dim),
      eval_(std::move(eval)),
      cert_(std::move(cert)) {
  if (!eval_) throw InvalidInput("AveragedOperator: empty map");
  if ((in_dim_ == kAnyDim) != (out_dim_ == kAnyDim)) {
    throw InvalidInput("AveragedOperator: kAnyDim must be used on both sides");
  }
  if (in_dim_ != kAnyDim && (in_dim_ < 1 || out_dim_ < 1)) {
    throw InvalidInput("AveragedOperator: dimensions must be >= 1");
  }
}

Vec AveragedOperator::operator()(const Vec& x) const {
  if (in_dim_ != kAnyDim && x.size() != in_dim_) {
    throw InvalidInput(label_ + ": expected input of dimension " +
                       std::to_string(in_dim_) + ", got " +
                       std::to_string(x.size()));
  }
  return eval_(x);
}

AveragedOperator AveragedOperator::WithCertificate(GammaCertificate cert) const {
  AveragedOperator copy = *this;
  copy.cert_ = std::move(cert);
  return copy;
}

AveragedOperator AveragedOperator::WithLabel(std::string label) const {
  AveragedOperator copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

double AveragednessGap(const Vec& x, const Vec& y, const Vec& ox,
                       const Vec& oy, double gamma) {
  const double lhs = (ox - oy).squaredNorm();
  const double rhs = (x - y).squaredNorm() -
                     (1.0 - gamma) / gamma * ((x - ox) - (y - oy)).squaredNorm();
  return lhs - rhs;
}

AveragednessReport CheckAveraged(const VecMap& op, double gamma,
                                 std::span<const VecPair> pairs, double tol) {
  RequireGammaInRange(gamma);
  if (pairs.empty()) throw InvalidInput("CheckAveraged: no sample pairs");

  AveragednessReport report;
  report.gamma = gamma;
  report.samples = pairs.size();
  report.worst_violation = -std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    RequireSameDim(x, y, "CheckAveraged");
    const Vec ox = op(x);
    const Vec oy = op(y);
    const double gap = AveragednessGap(x, y, ox, oy, gamma);
    // NaN counts as a violation.
    if (!(gap <= report.worst_violation)) {
      report.worst_violation = std::isnan(gap)
                                   ? std::numeric_limits<double>::infinity()
                                   : gap;
      worst = i;
    }
  }
  report.pass = report.worst_violation <= tol;
  if (!report.pass) {
    report.witness =
        Witness{pairs[worst].first, pairs[worst].second, report.worst_violation};
  }
  return report;
}

AveragednessReport CheckAveraged(const AveragedOperator& op, double gamma,
                                 std::span<const VecPair> pairs, double tol) {
  if (op.in_dim() != op.out_dim()) {
    throw InvalidInput(op.label() +
                       ": averagedness is defined for endomorphisms only");
  }
  for (const auto& [x, y] : pairs) {
    if (op.in_dim() != kAnyDim &&
        (x.size() != op.in_dim() || y.size() != op.in_dim())) {
      throw InvalidInput(op.label() + ": sample pair dimension mismatch");
    }
  }
  AveragednessReport report = CheckAveraged(op.map(), gamma, pairs, tol);
  report.label = op.label();
  report.provenance = op.certificate().provenance();
  return report;
}

std::vector<VecPair> SamplePairs(Index dim, const Vec& lo, const Vec& hi,
                                 std::size_t count, Rng& rng) {
  if (dim < 1) throw InvalidInput("SamplePairs: dimension must be >= 1");
  if (lo.size() != dim || hi.size() != dim) {
    throw InvalidInput("SamplePairs: box dimension mismatch");
  }
  if (!((hi - lo).array() > 0.0).all()) {
    throw InvalidInput("SamplePairs: degenerate box");
  }
  std::vector<VecPair> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec x = UniformInBox(rng, lo, hi);
    Vec y = UniformInBox(rng, lo, hi);
    pairs.emplace_back(std::move(x), std::move(y));
  }
  return pairs;
}

std::vector<VecPair> SampleLocalPairs(const Vec& lo, const Vec& hi, std::size_t count,
                                      double min_radius, double max_radius, Rng& rng) {
  if (lo.size() != hi.size() || !((hi - lo).array() > 0.0).all()) {
    throw InvalidInput("SampleLocalPairs: degenerate box");
  }
  if (!(min_radius > 0.0 && min_radius <= max_radius)) {
    throw InvalidInput("SampleLocalPairs: need 0 < min_radius <= max_radius");
  }
  std::uniform_real_distribution<double> log_r(std::log(min_radius), std::log(max_radius));
  std::vector<VecPair> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec x = UniformInBox(rng, lo, hi);
    Vec u = StandardNormal(rng, lo.size());
    const double n = u.norm();
    if (n == 0.0) u = Vec::Unit(lo.size(), 0); else u /= n;
    Vec y = (x + std::exp(log_r(rng)) * u).cwiseMax(lo).cwiseMin(hi);
    if (y == x) y[0] = x[0] == hi[0] ? lo[0] : hi[0];
    pairs.emplace_back(std::move(x), std::move(y));
  }
  return pairs;
}

std::vector<VecPair> SamplePairs(Index dim, const SamplingOptions& options,
                                 std::string_view consumer) {
  Rng rng = MakeRng(options.seed, consumer);
  return SamplePairs(dim, Vec::Constant(dim, options.box_lo),
                     Vec::Constant(dim, options.box_hi), options.pairs, rng);
}

double ComposedGamma(std::span<const double> gammas) {
  if (gammas.empty()) throw InvalidInput("ComposedGamma: empty list");
  double sum = 0.0;
  for (double g : gammas) {
    RequireGammaInRange(g);
    if (g == 1.0) return 1.0;  // limit of the formula as g -> 1
    sum += g / (1.0 - g);
  }
  return sum / (1.0 + sum);
}

AveragedOperator Compose(const std::vector<AveragedOperator>& ops) {
  if (ops.empty()) throw InvalidInput("Compose: empty operator list");
  for (std::size_t i = 0; i + 1 < ops.size(); ++i) {
    const Index in_outer = ops[i].in_dim();
    const Index out_inner = ops[i + 1].out_dim();
    if (in_outer != kAnyDim && out_inner != kAnyDim && in_outer != out_inner) {
      throw InvalidInput("Compose: " + ops[i + 1].label() + " outputs " +
                         std::to_string(out_inner) + " values but " +
                         ops[i].label() + " expects " +
                         std::to_string(in_outer));
    }
  }
  if (ops.size() == 1) return ops.front();

  std::vector<double> gammas;
  std::string label;
  for (const auto& op : ops) {
    gammas.push_back(op.gamma());
    if (!label.empty()) label += " o ";
    label += op.label();
  }
  // Dimensions of a chain: input of the innermost, output of the outermost.
  Index in_dim = kAnyDim;
  for (auto it = ops.rbegin(); it != ops.rend() && in_dim == kAnyDim; ++it) {
    in_dim = it->in_dim();
  }
  Index out_dim = kAnyDim;
  for (auto it = ops.begin(); it != ops.end() && out_dim == kAnyDim; ++it) {
    out_dim = it->out_dim();
  }
  if ((in_dim == kAnyDim) != (out_dim == kAnyDim)) {
    // A fixed-dimension map inside a coordinatewise chain: the free side
    // inherits the fixed one.
    if (in_dim == kAnyDim) in_dim = out_dim;
    if (out_dim == kAnyDim) out_dim = in_dim;
  }

  std::vector<AveragedOperator> chain = ops;
  VecMap eval = [chain = std::move(chain)](const Vec& x) {
    Vec v = x;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) v = (*it)(v);
    return v;
  };
  return AveragedOperator(label, in_dim, out_dim, std::move(eval),
                          GammaCertificate::Derived(ComposedGamma(gammas)));
}

AveragedOperator WeightedSum(const std::vector<AveragedOperator>& ops,
                             std::span<const double> weights,
                             double weight_tol) {
  if (ops.empty()) throw InvalidInput("WeightedSum: empty operator list");
  if (ops.size() != weights.size()) {
    throw InvalidInput("WeightedSum: operator/weight count mismatch");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidInput("WeightedSum: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > weight_tol) {
    throw InvalidInput("WeightedSum: weights sum to " + std::to_string(total) +
                       ", expected 1");
  }
  const Index dim = ops.front().in_dim();
  for (const auto& op : ops) {
    if (op.in_dim() != op.out_dim() || op.in_dim() != dim) {
      throw InvalidInput("WeightedSum: operators must share one space");
    }
  }
  if (ops.size() == 1) return ops.front();

  double gamma = 0.0;
  std::string label = "sum(";
  for (std::size_t i = 0; i < ops.size(); ++i) {
    gamma += weights[i] * ops[i].gamma();
    if (i > 0) label += ", ";
    label += ops[i].label();
  }
  label += ")";
  gamma = std::min(gamma, 1.0);

  std::vector<double> w(weights.begin(), weights.end());
  VecMap eval = [ops, w = std::move(w)](const Vec& x) {
    std::vector<Vec> terms;
    terms.reserve(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) terms.push_back(w[i] * ops[i](x));
    // Sum each coordinate in sorted order so the result depends only on the
    // multiset of terms, not on the order the operators were listed in.
    Vec out(terms.front().size());
    std::vector<double> column(terms.size());
    for (Index k = 0; k < out.size(); ++k) {
      for (std::size_t i = 0; i < terms.size(); ++i) column[i] = terms[i][k];
      std::sort(column.begin(), column.end());
      out[k] = std::accumulate(column.begin(), column.end(), 0.0);
    }
    return out;
  };
  return AveragedOperator(label, dim, dim, std::move(eval),
                          GammaCertificate::Derived(gamma));
}

AveragedOperator PromoteLipschitz(VecMap map, double mu, Index dim,
                                  std::string label) {
  if (!(mu >= 0.0 && mu < 1.0)) {
    throw InvalidInput("PromoteLipschitz: need 0 <= mu < 1, got " +
                       std::to_string(mu));
  }
  return AveragedOperator(std::move(label), dim, dim, std::move(map),
                          GammaCertificate::Derived((1.0 + mu) / 2.0));
}

namespace {

// Per-pair terms of the gap: gap(gamma) = a + (1-gamma)/gamma * r.
struct GapTerms {
  std::vector<double> a;
  std::vector<double> r;
  double lipschitz = 0.0;
};

GapTerms EvaluateGapTerms(const VecMap& map, std::span<const VecPair> pairs) {
  GapTerms terms;
  terms.a.reserve(pairs.size());
  terms.r.reserve(pairs.size());
  for (const auto& [x, y] : pairs) {
    const Vec ox = map(x);
    const Vec oy = map(y);
    const double dist = (x - y).norm();
    const double img = (ox - oy).norm();
    terms.a.push_back((ox - oy).squaredNorm() - (x - y).squaredNorm());
    terms.r.push_back(((x - ox) - (y - oy)).squaredNorm());
    if (dist > 0.0) {
      const double q = img / dist;
      terms.lipschitz = std::isfinite(q) ? std::max(terms.lipschitz, q)
                                         : std::numeric_limits<double>::infinity();
    }
  }
  return terms;
}

double WorstGap(const GapTerms& t, double gamma) {
  const double c = (1.0 - gamma) / gamma;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.a.size(); ++i) {
    const double gap = t.a[i] + c * t.r[i];
    if (!(gap <= worst)) worst = std::isnan(gap) ? std::numeric_limits<double>::infinity() : gap;
  }
  return worst;
}

std::optional<double> BisectGamma(const GapTerms& t, double tol, double floor) {
  if (!(WorstGap(t, 1.0) <= tol)) return std::nullopt;
  if (WorstGap(t, floor) <= tol) return floor;
  double lo = floor;  // fails
  double hi = 1.0;    // passes
  for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (WorstGap(t, mid) <= tol) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

std::optional<double> SmallestPassingGamma(const VecMap& map,
                                           std::span<const VecPair> pairs,
                                           double tol, double floor) {
  if (pairs.empty()) throw InvalidInput("SmallestPassingGamma: no pairs");
  return BisectGamma(EvaluateGapTerms(map, pairs), tol, floor);
}

GammaEstimate EstimateGamma(const VecMap& map, const Vec& box_lo,
                            const Vec& box_hi, const EstimateOptions& options) {
  if (options.samples < 2) throw InvalidInput("EstimateGamma: samples must be >= 2");
  if (!(options.local_fraction >= 0.0 && options.local_fraction <= 1.0)) {
    throw InvalidInput("EstimateGamma: local_fraction must be in [0, 1]");
  }
  const auto local = static_cast<std::size_t>(
      std::floor(options.local_fraction * static_cast<double>(options.samples)));
  Rng rng = MakeRng(options.seed, "estimate_gamma");
  auto pairs = SamplePairs(box_lo.size(), box_lo, box_hi, options.samples - local, rng);
  if (local > 0) {
    // Radii from 1e-3 to 1 times the half-diagonal of the box.
    const double half_diag = (box_hi - box_lo).norm() / 2.0;
    Rng local_rng = MakeRng(options.seed, "estimate_gamma/local");
    auto near = SampleLocalPairs(box_lo, box_hi, local, 1e-3 * half_diag, half_diag,
                                 local_rng);
    pairs.insert(pairs.end(), std::make_move_iterator(near.begin()),
                 std::make_move_iterator(near.end()));
  }
  const GapTerms terms = EvaluateGapTerms(map, pairs);

  GammaEstimate est;
  est.lipschitz = terms.lipschitz;
  est.samples = pairs.size();

  EstimateInfo info;
  info.samples = pairs.size();
  info.lipschitz = terms.lipschitz;
  info.seed = options.seed;

  if (terms.lipschitz < 1.0) {
    const double gamma = (1.0 + terms.lipschitz) / 2.0;
    info.max_violation = WorstGap(terms, gamma);
    est.certificate = GammaCertificate::Numeric(gamma, info);
    return est;
  }
  const auto gamma = BisectGamma(terms, options.tol, options.bisection_floor);
  if (!gamma) {
    est.nonexpansive_violation = WorstGap(terms, 1.0);
    return est;
  }
  info.max_violation = WorstGap(terms, *gamma);
  est.certificate = GammaCertificate::Numeric(*gamma, info);
  return est;
}

AveragedOperator IdentityOperator(Index dim) {
  return AveragedOperator("identity", dim, dim, [](const Vec& x) { return x; },
                          GammaCertificate::ClosedForm(1.0));
}

}  // namespace avgnet
