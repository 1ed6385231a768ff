#pragma once

#include "avgnet/operator_core.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace avgnet {

// Named real parameters of an activation (lambda, b, alpha, epsilon, ...).
using ActivationParams = std::map<std::string, double>;

enum class Arity {
  kElementwise,  // scalar function applied coordinatewise, any dimension
  kVector,       // R^n -> R^n, not coordinatewise (softmax, x / (1 + |x|))
  kReduce,       // R^n -> R; certified and used on R^1 only
};

std::string_view ToString(Arity a);

// How the catalog obtains gamma for a row.
enum class GammaRule {
  kClosedForm,  // closed-form constant, valid inside the parameter regime
  kDerived,     // derived here from a Lipschitz bound
  kEstimate,    // no constant available: sampled estimate
  kCompose,     // composition of other rows
};

std::string_view ToString(GammaRule r);

struct ParamSpec {
  std::string name;
  double default_value = 0.0;
  std::string description;
};

struct CatalogEntry {
  std::string name;     // unique identifier, e.g. "sigmoid"
  std::string title;    // human-readable title
  std::string formula;  // formula identifier
  Arity arity = Arity::kElementwise;
  std::vector<ParamSpec> params;
  GammaRule rule = GammaRule::kClosedForm;
  std::string gamma_formula;  // textual formula, "estimate" or "compose"
};

const std::vector<CatalogEntry>& Catalog();
const CatalogEntry& FindCatalogEntry(std::string_view name);  // throws
std::vector<std::string> CatalogNames();

struct ActivationSpec {
  std::string kind;
  ActivationParams params;  // defaults filled in
  Arity arity = Arity::kElementwise;
  VecMap eval;
  // Closed-form constant when the entry has one and the parameters are in regime,
  // before any verification.
  std::optional<double> claimed_gamma;
  GammaRule rule = GammaRule::kClosedForm;
  std::optional<GammaCertificate> certificate;  // empty: not certifiable
  std::optional<double> lipschitz_estimate;     // from sampled estimates
  std::string note;  // discrepancy or regime message, empty if none

  bool certified() const { return certificate.has_value(); }
  Vec operator()(const Vec& x) const { return eval(x); }

  // Input/output dimension (kAnyDim unless kReduce, which is 1).
  Index dim() const { return arity == Arity::kReduce ? 1 : kAnyDim; }

  // Wraps the activation as an AveragedOperator; throws NumericalError when
  // not certifiable.
  AveragedOperator Operator() const;
};

struct ActivationOptions {
  // Confirm a claimed closed-form gamma with a sampled check before trusting
  // it. A claim that fails is downgraded to a numeric estimate.
  bool verify_claim = true;
  SamplingOptions sampling;
  Index vector_dim = 3;  // dimension used to certify kVector rows
  // Inner map r0 for the attention-based rows; defaults to linear(1/2).
  std::optional<ActivationSpec> inner;
};

/// Builds an activation from the catalog.
///
/// Unknown parameter names and parameters outside the row's domain of
/// definition are rejected with InvalidInput. Missing parameters take the
/// catalog defaults.
ActivationSpec MakeActivation(std::string_view kind,
                              const ActivationParams& params = {},
                              const ActivationOptions& options = {});

// Scalar evaluation of an elementwise row (convenience for tests and prox
// comparisons). Throws for non-elementwise rows.
double EvalScalar(const ActivationSpec& spec, double x);

}  // namespace avgnet
