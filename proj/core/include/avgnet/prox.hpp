#pragma once

#include "avgnet/types.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace avgnet {

/// Extended-real convex function on R, +inf outside [lo, hi].
///
/// Open ends (closed_lo/closed_hi false) are excluded from the domain; the
/// value function is only called inside the domain.
struct ProxPotential {
  std::string name;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool closed_lo = false;
  bool closed_hi = false;
  std::function<double(double)> value;

  bool InDomain(double y) const;
  // value(y) inside the domain, +inf outside.
  double operator()(double y) const;
};

// f = 0; prox is the identity.
ProxPotential ZeroPotential();

// Log-entropy potential on [-1/2, 1/2]. Its prox is sigmoid(x) - 1/2.
ProxPotential CenteredSigmoidPotential();

// Shift of the centered potential onto [0, 1]. Its prox is the sigmoid.
ProxPotential SigmoidPotential();

// Potential on (-1, 1) whose prox is the softsign x / (1 + |x|).
ProxPotential SoftsignPotential();

// Potential whose prox is the named activation, for the rows where one is
// known in closed form ("identity", "sigmoid", "softsign").
std::optional<ProxPotential> PotentialFor(std::string_view activation);

/// argmin_y f(y) + (x - y)^2 / 2 by a bracketing 1-D minimizer over the
/// domain. Never uses the activation's closed form.
double ProxEval(const ProxPotential& f, double x, double tol = 1e-12);

// Legendre-Fenchel conjugate of y^2/2 + f(y): sup_y xy - y^2/2 - f(y).
double ConjugateEval(const ProxPotential& f, double x);

// Central difference of ConjugateEval at x.
double ConjugateDerivative(const ProxPotential& f, double x, double h = 1e-4);

// Minimizer of f over its domain (the fixed points of its prox).
double PotentialMinimizer(const ProxPotential& f);

// Largest midpoint-convexity violation f((a+b)/2) - (f(a)+f(b))/2 over
// `samples` seeded pairs drawn inside the domain (clipped to [-bound, bound]).
double MidpointConvexityViolation(const ProxPotential& f, std::size_t samples,
                                  std::uint64_t seed, double bound = 50.0);

struct ConjugateGradReport {
  std::string kind;
  std::vector<double> xs;
  std::vector<double> derivative;  // finite-difference derivative of g
  std::vector<double> activation;  // r(x)
  double max_error = 0.0;
  bool pass = false;
};

/// Checks g' = r for g = (|.|^2/2 + f)* with f the potential of `kind`
/// ("sigmoid" or "softsign").
ConjugateGradReport ConjugateGradIdentityCheck(std::string_view kind,
                                               const std::vector<double>& xs,
                                               double tol);

}  // namespace avgnet
