#include "avgnet/prox.hpp"

#include "avgnet/activations.hpp"
#include "avgnet/rng.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace avgnet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double XLogX(double u) { return u > 0.0 ? u * std::log(u) : 0.0; }

double F4(double z) {
  return XLogX(0.5 + z) + XLogX(0.5 - z) - (4.0 * z * z + 1.0) / 8.0;
}

// Search interval for a 1-D minimization over the domain of f. Open ends are
// pulled in by a relative hair so the value function stays finite.
std::pair<double, double> SearchInterval(const ProxPotential& f, double lo,
                                         double hi) {
  lo = std::max(lo, f.lo);
  hi = std::min(hi, f.hi);
  const double width = hi - lo;
  if (!(width > 0.0)) throw NumericalError(f.name + ": empty search interval");
  const double hair = 1e-15 * std::max(1.0, width);
  if (!f.closed_lo && lo == f.lo) lo += hair;
  if (!f.closed_hi && hi == f.hi) hi -= hair;
  return {lo, hi};
}

int BitsFor(double tol) {
  const int max_bits = std::numeric_limits<double>::digits / 2;
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be > 0");
  const int bits = static_cast<int>(std::ceil(-std::log2(tol)));
  return std::clamp(bits, 1, max_bits);
}

template <class F>
double Minimize(F&& objective, std::pair<double, double> interval, int bits) {
  std::uintmax_t max_iter = 1000;
  const auto [x, fx] = boost::math::tools::brent_find_minima(
      objective, interval.first, interval.second, bits, max_iter);
  if (!std::isfinite(fx)) {
    throw NumericalError("1-D minimization did not reach a finite value");
  }
  return x;
}

// Interval that contains the minimizer of f(y) + (y - x)^2 / 2: it lies
// between x and the domain (or 0 for unbounded domains).
std::pair<double, double> ProxInterval(const ProxPotential& f, double x) {
  const bool bounded = std::isfinite(f.lo) && std::isfinite(f.hi);
  if (bounded) return SearchInterval(f, f.lo, f.hi);
  const double c = std::isfinite(f.lo) ? f.lo : (std::isfinite(f.hi) ? f.hi : 0.0);
  const double lo = std::min(x, c) - 1.0 - std::abs(x);
  const double hi = std::max(x, c) + 1.0 + std::abs(x);
  return SearchInterval(f, lo, hi);
}

}  // namespace

bool ProxPotential::InDomain(double y) const {
  const bool above = closed_lo ? y >= lo : y > lo;
  const bool below = closed_hi ? y <= hi : y < hi;
  return above && below;
}

double ProxPotential::operator()(double y) const {
  return InDomain(y) ? value(y) : kInf;
}

ProxPotential ZeroPotential() {
  ProxPotential p;
  p.name = "zero";
  p.value = [](double) { return 0.0; };
  return p;
}

ProxPotential CenteredSigmoidPotential() {
  ProxPotential p;
  p.name = "centered_sigmoid";
  p.lo = -0.5;
  p.hi = 0.5;
  p.closed_lo = p.closed_hi = true;
  p.value = F4;
  return p;
}

ProxPotential SigmoidPotential() {
  ProxPotential p;
  p.name = "sigmoid";
  p.lo = 0.0;
  p.hi = 1.0;
  p.closed_lo = p.closed_hi = true;
  p.value = [](double y) { return F4(y - 0.5) - y / 2.0; };
  return p;
}

ProxPotential SoftsignPotential() {
  ProxPotential p;
  p.name = "softsign";
  p.lo = -1.0;
  p.hi = 1.0;
  p.value = [](double x) {
    const double a = std::abs(x);
    return -a - std::log1p(-a) - x * x / 2.0;
  };
  return p;
}

std::optional<ProxPotential> PotentialFor(std::string_view activation) {
  if (activation == "identity") return ZeroPotential();
  if (activation == "sigmoid") return SigmoidPotential();
  if (activation == "softsign") return SoftsignPotential();
  return std::nullopt;
}

double ProxEval(const ProxPotential& f, double x, double tol) {
  if (!std::isfinite(x)) throw InvalidInput("ProxEval: non-finite input");
  auto objective = [&](double y) { return f.value(y) + 0.5 * (x - y) * (x - y); };
  return Minimize(objective, ProxInterval(f, x), BitsFor(tol));
}

double ConjugateEval(const ProxPotential& f, double x) {
  if (!std::isfinite(x)) throw InvalidInput("ConjugateEval: non-finite input");
  auto negated = [&](double y) { return 0.5 * y * y + f.value(y) - x * y; };
  const double y = Minimize(negated, ProxInterval(f, x),
                            std::numeric_limits<double>::digits / 2);
  return -negated(y);
}

double ConjugateDerivative(const ProxPotential& f, double x, double h) {
  if (!(h > 0.0)) throw InvalidInput("ConjugateDerivative: h must be > 0");
  return (ConjugateEval(f, x + h) - ConjugateEval(f, x - h)) / (2.0 * h);
}

double PotentialMinimizer(const ProxPotential& f) {
  const double lo = std::isfinite(f.lo) ? f.lo : -1.0;
  const double hi = std::isfinite(f.hi) ? f.hi : 1.0;
  return Minimize(f.value, SearchInterval(f, lo, hi),
                  std::numeric_limits<double>::digits / 2);
}

double MidpointConvexityViolation(const ProxPotential& f, std::size_t samples,
                                  std::uint64_t seed, double bound) {
  const auto [lo, hi] = SearchInterval(f, std::max(f.lo, -bound),
                                       std::min(f.hi, bound));
  Rng rng = MakeRng(seed, "midpoint_convexity/" + f.name);
  std::uniform_real_distribution<double> unit(lo, hi);
  double worst = -kInf;
  for (std::size_t i = 0; i < samples; ++i) {
    const double a = unit(rng);
    const double b = unit(rng);
    worst = std::max(worst, f.value(0.5 * (a + b)) - 0.5 * (f.value(a) + f.value(b)));
  }
  return worst;
}

ConjugateGradReport ConjugateGradIdentityCheck(std::string_view kind,
                                               const std::vector<double>& xs,
                                               double tol) {
  if (kind != "sigmoid" && kind != "softsign") {
    throw InvalidInput("conjugate gradient check is available for sigmoid and "
                       "softsign only");
  }
  const ProxPotential f = *PotentialFor(kind);
  ActivationOptions opts;
  opts.verify_claim = false;
  const ActivationSpec r = MakeActivation(kind, {}, opts);

  ConjugateGradReport report;
  report.kind = std::string(kind);
  report.xs = xs;
  for (double x : xs) {
    const double d = ConjugateDerivative(f, x);
    const double rx = EvalScalar(r, x);
    report.derivative.push_back(d);
    report.activation.push_back(rx);
    report.max_error = std::max(report.max_error, std::abs(d - rx));
  }
  report.pass = report.max_error <= tol;
  return report;
}

}  // namespace avgnet
