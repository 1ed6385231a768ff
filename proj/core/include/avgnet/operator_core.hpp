#pragma once

#include "avgnet/rng.hpp"
#include "avgnet/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace avgnet {

enum class Provenance { kClosedForm, kDerivedFormula, kNumericEstimate };

std::string_view ToString(Provenance p);

// Metadata attached to sampled certificates.
struct EstimateInfo {
  std::size_t samples = 0;
  double max_violation = 0.0;  // max of LHS - RHS at the certified gamma
  double lipschitz = 0.0;      // max difference quotient on the sample
  std::uint64_t seed = 0;
};

/// Averagedness constant gamma in (0, 1] together with where it came from.
class GammaCertificate {
 public:
  static GammaCertificate ClosedForm(double gamma);
  static GammaCertificate Derived(double gamma);
  static GammaCertificate Numeric(double gamma, EstimateInfo info);

  double gamma() const { return gamma_; }
  Provenance provenance() const { return provenance_; }
  const std::optional<EstimateInfo>& estimate() const { return estimate_; }

 private:
  GammaCertificate(double gamma, Provenance p, std::optional<EstimateInfo> e);

  double gamma_;
  Provenance provenance_;
  std::optional<EstimateInfo> estimate_;
};

void RequireGammaInRange(double gamma);

// Marker for operators that act coordinatewise on any dimension.
inline constexpr Index kAnyDim = -1;

/// An evaluatable map together with its gamma certificate.
///
/// Dimensions are fixed at construction (or kAnyDim for coordinatewise
/// maps); evaluation rejects inputs of the wrong size. Endomorphisms have
/// in_dim() == out_dim(). Layer maps between different spaces are allowed so
/// that compose() can chain them.
class AveragedOperator {
 public:
  AveragedOperator(std::string label, Index in_dim, Index out_dim, VecMap eval,
                   GammaCertificate cert);
  AveragedOperator(std::string label, Index dim, VecMap eval,
                   GammaCertificate cert)
      : AveragedOperator(std::move(label), dim, dim, std::move(eval),
                         std::move(cert)) {}

  Vec operator()(const Vec& x) const;

  const std::string& label() const { return label_; }
  Index in_dim() const { return in_dim_; }
  Index out_dim() const { return out_dim_; }
  const GammaCertificate& certificate() const { return cert_; }
  double gamma() const { return cert_.gamma(); }
  const VecMap& map() const { return eval_; }

  AveragedOperator WithCertificate(GammaCertificate cert) const;
  AveragedOperator WithLabel(std::string label) const;

 private:
  std::string label_;
  Index in_dim_;
  Index out_dim_;
  VecMap eval_;
  GammaCertificate cert_;
};

using VecPair = std::pair<Vec, Vec>;

struct Witness {
  Vec x;
  Vec y;
  double violation = 0.0;
};

struct AveragednessReport {
  std::string label;
  double gamma = 1.0;
  Provenance provenance = Provenance::kNumericEstimate;
  std::size_t samples = 0;
  double worst_violation = 0.0;
  std::optional<Witness> witness;  // set iff !pass
  bool pass = false;
};

// LHS - RHS of the averagedness inequality
//   |Ox - Oy|^2 <= |x - y|^2 - (1-gamma)/gamma |x - Ox - y + Oy|^2
double AveragednessGap(const Vec& x, const Vec& y, const Vec& ox,
                       const Vec& oy, double gamma);

AveragednessReport CheckAveraged(const VecMap& op, double gamma,
                                 std::span<const VecPair> pairs, double tol);

// Same as above, but validates pair dimensions against the operator and
// fills label/provenance from it.
AveragednessReport CheckAveraged(const AveragedOperator& op, double gamma,
                                 std::span<const VecPair> pairs, double tol);

struct SamplingOptions {
  double box_lo = -20.0;
  double box_hi = 20.0;
  std::size_t pairs = 10000;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-9;
};

std::vector<VecPair> SamplePairs(Index dim, const Vec& lo, const Vec& hi,
                                 std::size_t count, Rng& rng);
std::vector<VecPair> SamplePairs(Index dim, const SamplingOptions& options,
                                 std::string_view consumer);

// Pairs (x, x + r u) with x uniform in the box, u a random unit direction and
// r log-uniform in [min_radius, max_radius]; y is clamped back into the box.
std::vector<VecPair> SampleLocalPairs(const Vec& lo, const Vec& hi, std::size_t count,
                                      double min_radius, double max_radius, Rng& rng);

// Averagedness of a composition: 1 / (1 + 1 / sum g/(1-g)), with a
// gamma = 1 term giving 1.
double ComposedGamma(std::span<const double> gammas);

/// ops are listed outermost first: Compose({A, B}) evaluates A(B(x)).
AveragedOperator Compose(const std::vector<AveragedOperator>& ops);

AveragedOperator WeightedSum(const std::vector<AveragedOperator>& ops,
                             std::span<const double> weights,
                             double weight_tol = 1e-12);

// Certifies a mu-Lipschitz map (mu < 1) as (1 + mu)/2-averaged.
AveragedOperator PromoteLipschitz(VecMap map, double mu, Index dim,
                                  std::string label);

struct GammaEstimate {
  std::optional<GammaCertificate> certificate;  // empty: not certifiable
  double lipschitz = 0.0;
  std::size_t samples = 0;
  // Worst violation at gamma = 1 when not certifiable.
  double nonexpansive_violation = 0.0;

  bool certifiable() const { return certificate.has_value(); }
};

struct EstimateOptions {
  std::size_t samples = 10000;  // number of sampled pairs
  // Share of the pairs drawn close together (SampleLocalPairs); independent
  // box pairs miss steep local slopes in high dimension.
  double local_fraction = 0.5;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-9;
  double bisection_floor = 1e-6;
};

/// Numerical gamma estimate on a box.
///
/// With Lipschitz estimate mu < 1 the result is (1 + mu)/2. Otherwise the
/// smallest gamma passing CheckAveraged on the same sample is located by
/// bisection, or the map is reported not certifiable.
GammaEstimate EstimateGamma(const VecMap& map, const Vec& box_lo,
                            const Vec& box_hi, const EstimateOptions& options);

// Smallest gamma in [floor, 1] passing the check on the given pairs.
std::optional<double> SmallestPassingGamma(const VecMap& map,
                                           std::span<const VecPair> pairs,
                                           double tol, double floor = 1e-6);

AveragedOperator IdentityOperator(Index dim);

}  // namespace avgnet
