#include "avgnet/activations.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace avgnet {
namespace {

using P = ActivationParams;
using ScalarFn = std::function<double(double, const P&)>;
using VectorFn = std::function<Vec(const Vec&, const P&)>;
using GammaFn = std::function<std::optional<double>(const P&)>;
using ValidateFn = std::function<void(const P&)>;

struct Row {
  CatalogEntry entry;
  ScalarFn scalar;  // kElementwise
  VectorFn vector;  // kVector / kReduce
  GammaFn gamma;    // claimed constant when in regime
  ValidateFn validate;
};

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + e^x) without overflow.
double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double Softsign(double x) { return x / (1.0 + std::abs(x)); }

double Get(const P& p, const char* name) { return p.at(name); }

GammaFn Constant(double g) {
  return [g](const P&) -> std::optional<double> { return g; };
}

GammaFn HalfOnePlusAbsLambda(bool strict) {
  return [strict](const P& p) -> std::optional<double> {
    const double l = std::abs(Get(p, "lambda"));
    if (strict ? l < 1.0 : l <= 1.0) return (1.0 + l) / 2.0;
    return std::nullopt;
  };
}

ValidateFn Positive(const char* name) {
  return [name](const P& p) {
    if (!(Get(p, name) > 0.0)) {
      throw InvalidInput(std::string("parameter ") + name + " must be > 0");
    }
  };
}

ValidateFn NonNegative(const char* name) {
  return [name](const P& p) {
    if (!(Get(p, name) >= 0.0)) {
      throw InvalidInput(std::string("parameter ") + name + " must be >= 0");
    }
  };
}

ParamSpec Lambda(double def, std::string desc = "scale") {
  return {"lambda", def, std::move(desc)};
}

Row Elementwise(std::string name, std::string title,
                std::string formula, std::vector<ParamSpec> params,
                GammaRule rule, std::string gamma_formula, ScalarFn f,
                GammaFn gamma = nullptr, ValidateFn validate = nullptr) {
  Row r;
  r.entry = {std::move(name), std::move(title), std::move(formula),
             Arity::kElementwise, std::move(params), rule,
             std::move(gamma_formula)};
  r.scalar = std::move(f);
  r.gamma = std::move(gamma);
  r.validate = std::move(validate);
  return r;
}

Row NonElementwise(std::string name, std::string title,
                   std::string formula, Arity arity,
                   std::vector<ParamSpec> params, GammaRule rule,
                   std::string gamma_formula, VectorFn f, GammaFn gamma) {
  Row r;
  r.entry = {std::move(name), std::move(title), std::move(formula),
             arity, std::move(params), rule, std::move(gamma_formula)};
  r.vector = std::move(f);
  r.gamma = std::move(gamma);
  return r;
}

Vec Softmax(const Vec& x, double lambda) {
  const Vec z = lambda * x;
  const double m = z.maxCoeff();
  Vec e = (z.array() - m).exp().matrix();
  return e / e.sum();
}

std::vector<Row> BuildRows() {
  const auto c = GammaRule::kClosedForm;
  std::vector<Row> rows;

  rows.push_back(Elementwise("identity", "Identity", "x", {}, c, "1",
                             [](double x, const P&) { return x; },
                             Constant(1.0)));
  rows.push_back(Elementwise(
      "linear", "Linear", "lambda*x+b",
      {Lambda(0.5), {"b", 0.0, "offset"}}, c, "(1+|lambda|)/2 if |lambda|<=1",
      [](double x, const P& p) { return Get(p, "lambda") * x + Get(p, "b"); },
      HalfOnePlusAbsLambda(false)));
  rows.push_back(Elementwise(
      "relu", "Rectified linear unit", "max(0,lambda*x+b)",
      {Lambda(1.0), {"b", 0.0, "offset"}}, c, "(1+|lambda|)/2 if |lambda|<=1",
      [](double x, const P& p) {
        return std::max(0.0, Get(p, "lambda") * x + Get(p, "b"));
      },
      HalfOnePlusAbsLambda(false)));
  rows.push_back(Elementwise(
      "logistic", "Logistic", "1/(1+exp(-lambda*x-b))",
      {Lambda(1.0), {"b", 0.0, "offset"}}, c, "(4+|lambda|)/8 if |lambda|<=1",
      [](double x, const P& p) {
        return Sigmoid(Get(p, "lambda") * x + Get(p, "b"));
      },
      [](const P& p) -> std::optional<double> {
        const double l = std::abs(Get(p, "lambda"));
        if (l <= 1.0) return (4.0 + l) / 8.0;
        return std::nullopt;
      }));
  rows.push_back(Elementwise("sigmoid", "Sigmoid", "1/(1+exp(-x))", {},
                             c, "5/8",
                             [](double x, const P&) { return Sigmoid(x); },
                             Constant(5.0 / 8.0)));
  rows.push_back(Elementwise(
      "tanh", "Hyperbolic tangent", "lambda*tanh(x)", {Lambda(0.5)}, c,
      "(1+|lambda|)/2 if |lambda|<1",
      [](double x, const P& p) { return Get(p, "lambda") * std::tanh(x); },
      HalfOnePlusAbsLambda(true)));
  rows.push_back(NonElementwise(
      "softmax", "Softmax", "exp(lambda*x_i)/sum_k exp(lambda*x_k)",
      Arity::kVector, {Lambda(0.5)}, c, "(1+|lambda|)/2 if |lambda|<1",
      [](const Vec& x, const P& p) { return Softmax(x, Get(p, "lambda")); },
      HalfOnePlusAbsLambda(true)));
  rows.push_back(Elementwise(
      "gelu_tanh", "Gaussian error linear unit (tanh form)",
      "lambda*x/2*(1+tanh(sqrt(2/pi)*(x+0.044715x^3)))", {Lambda(1.0)}, c,
      "18/20",
      [](double x, const P& p) {
        const double k = std::sqrt(2.0 / std::numbers::pi);
        return Get(p, "lambda") * 0.5 * x *
               (1.0 + std::tanh(k * (x + 0.044715 * x * x * x)));
      },
      Constant(18.0 / 20.0)));
  rows.push_back(Elementwise(
      "gelu", "Gaussian error linear unit", "lambda*x*Phi(x)",
      {Lambda(1.0)}, c, "(1+|lambda|)/2 if |lambda|<=1",
      [](double x, const P& p) { return Get(p, "lambda") * x * Phi(x); },
      HalfOnePlusAbsLambda(false)));
  rows.push_back(Elementwise(
      "softplus_scaled", "Softplus (scaled)", "lambda*log(1+exp(x))",
      {Lambda(1.0)}, c, "(1+|lambda|)/2 if |lambda|<=1",
      [](double x, const P& p) { return Get(p, "lambda") * Softplus(x); },
      HalfOnePlusAbsLambda(false)));
  rows.push_back(Elementwise(
      "softplus_sharp", "Softplus (sharpness)",
      "log(1+exp(lambda*x))/lambda", {Lambda(1.0, "sharpness, > 0")}, c, "1",
      [](double x, const P& p) {
        const double l = Get(p, "lambda");
        return Softplus(l * x) / l;
      },
      Constant(1.0), Positive("lambda")));
  rows.push_back(NonElementwise(
      "softplus_sum", "Softplus (vector)", "log(1+sum_k exp(x_k))",
      Arity::kReduce, {}, c, "1",
      [](const Vec& x, const P&) {
        const double m = std::max(0.0, x.maxCoeff());
        const double s = std::exp(-m) + (x.array() - m).exp().sum();
        return Vec::Constant(1, m + std::log(s));
      },
      Constant(1.0)));
  rows.push_back(Elementwise(
      "elu", "Exponential linear unit",
      "lambda*(exp(x)-1) if x<=0 else x", {Lambda(1.0)}, c, "1",
      [](double x, const P& p) {
        return x <= 0.0 ? Get(p, "lambda") * std::expm1(x) : x;
      },
      Constant(1.0)));
  rows.push_back(Elementwise(
      "selu", "Scaled exponential linear unit",
      "lambda*alpha*(exp(x)-1) if x<0 else lambda*alpha*x",
      {Lambda(0.6733), {"alpha", 0.0507, "inner scale"}}, c, "lambda*alpha",
      [](double x, const P& p) {
        const double la = Get(p, "lambda") * Get(p, "alpha");
        return x < 0.0 ? la * std::expm1(x) : la * x;
      },
      [](const P& p) -> std::optional<double> {
        const double g = Get(p, "lambda") * Get(p, "alpha");
        if (g > 0.0 && g <= 1.0) return g;
        return std::nullopt;
      }));
  rows.push_back(Elementwise(
      "leaky_relu", "Leaky rectified linear unit",
      "0.01x if x<0 else x", {}, c, "1",
      [](double x, const P&) { return x < 0.0 ? 0.01 * x : x; },
      Constant(1.0)));
  rows.push_back(Elementwise(
      "prelu", "Parametric rectified linear unit",
      "lambda*x if x<0 else x", {Lambda(0.25, "negative slope")}, c, "1",
      [](double x, const P& p) { return x < 0.0 ? Get(p, "lambda") * x : x; },
      Constant(1.0)));
  rows.push_back(Elementwise("silu", "Sigmoid linear unit",
                             "x/(1+exp(-x))", {}, c, "1",
                             [](double x, const P&) { return x * Sigmoid(x); },
                             Constant(1.0)));
  rows.push_back(Elementwise(
      "swish", "Swish", "epsilon*x*sigmoid(lambda*x)",
      {{"epsilon", 0.5, "output scale"}, Lambda(1.0)}, c, "(10+11*epsilon)/20",
      [](double x, const P& p) {
        return Get(p, "epsilon") * x * Sigmoid(Get(p, "lambda") * x);
      },
      [](const P& p) -> std::optional<double> {
        const double g = (10.0 + 11.0 * Get(p, "epsilon")) / 20.0;
        if (g > 0.0 && g <= 1.0) return g;
        return std::nullopt;
      }));
  rows.push_back(NonElementwise(
      "gaussian", "Gaussian", "exp(-<x,x>)", Arity::kReduce, {}, c,
      "(1+exp(-1))/2",
      [](const Vec& x, const P&) {
        return Vec::Constant(1, std::exp(-x.squaredNorm()));
      },
      Constant((1.0 + std::exp(-1.0)) / 2.0)));
  rows.push_back(NonElementwise(
      "maxout", "Maxout", "max_k x_k", Arity::kReduce, {}, c, "1",
      [](const Vec& x, const P&) { return Vec::Constant(1, x.maxCoeff()); },
      Constant(1.0)));
  rows.push_back(Elementwise(
      "approx_heaviside", "Approximate Heaviside", "sigmoid(x/epsilon)",
      {{"epsilon", 0.5, "smoothing width, > 0"}}, c,
      "(1+4*epsilon)/(8*epsilon) if epsilon>=1/4",
      [](double x, const P& p) { return Sigmoid(x / Get(p, "epsilon")); },
      [](const P& p) -> std::optional<double> {
        const double e = Get(p, "epsilon");
        if (e >= 0.25) return (1.0 + 4.0 * e) / (8.0 * e);
        return std::nullopt;
      },
      Positive("epsilon")));
  rows.push_back(Elementwise(
      "multiquadratic", "Multiquadratics", "sqrt((x-alpha)^2+lambda^2)",
      {{"alpha", 0.0, "center"}, Lambda(1.0)}, c, "1",
      [](double x, const P& p) {
        return std::hypot(x - Get(p, "alpha"), Get(p, "lambda"));
      },
      Constant(1.0)));
  rows.push_back(Elementwise(
      "inverse_multiquadratic", "Inverse multiquadratics",
      "1/sqrt((x-alpha)^2+(1+lambda)^2)",
      {{"alpha", 0.0, "center"}, Lambda(1.0)}, c,
      "(2+lambda)/(2(1+lambda)) if lambda>=0",
      [](double x, const P& p) {
        return 1.0 / std::hypot(x - Get(p, "alpha"), 1.0 + Get(p, "lambda"));
      },
      [](const P& p) -> std::optional<double> {
        const double l = Get(p, "lambda");
        if (l >= 0.0) return (2.0 + l) / (2.0 * (1.0 + l));
        return std::nullopt;
      },
      [](const P& p) {
        if (1.0 + Get(p, "lambda") == 0.0) {
          throw InvalidInput("parameter lambda must differ from -1");
        }
      }));
  rows.push_back(Elementwise(
      "mish", "Mish", "x*tanh(softplus(x))", {}, GammaRule::kEstimate,
      "estimate",
      [](double x, const P&) { return x * std::tanh(Softplus(x)); }));
  rows.push_back(Elementwise(
      "metallic_mean", "Metallic mean", "(x+sqrt(x^2+4))/2", {}, c,
      "1/2", [](double x, const P&) { return (x + std::hypot(x, 2.0)) / 2.0; },
      Constant(0.5)));
  rows.push_back(Elementwise("arctan", "Arc tangent", "atan(x)", {}, c,
                             "1",
                             [](double x, const P&) { return std::atan(x); },
                             Constant(1.0)));
  rows.push_back(Elementwise("softsign", "Softsign", "x/(1+|x|)", {}, c,
                             "1",
                             [](double x, const P&) { return Softsign(x); },
                             Constant(1.0)));
  rows.push_back(Elementwise(
      "isru", "Inverse square root unit", "x/sqrt(1+(1+lambda)x^2)",
      {Lambda(1.0)}, c,
      "(1+sqrt(1+lambda))/(2*sqrt(1+lambda)) if lambda>=0",
      [](double x, const P& p) {
        return x / std::sqrt(1.0 + (1.0 + Get(p, "lambda")) * x * x);
      },
      [](const P& p) -> std::optional<double> {
        const double l = Get(p, "lambda");
        if (l >= 0.0) {
          const double s = std::sqrt(1.0 + l);
          return (1.0 + s) / (2.0 * s);
        }
        return std::nullopt;
      },
      [](const P& p) {
        if (!(Get(p, "lambda") > -1.0)) {
          throw InvalidInput("parameter lambda must be > -1");
        }
      }));
  rows.push_back(Elementwise(
      "isrlu", "Inverse square root linear unit",
      "x/sqrt(1+lambda*x^2) if x<0 else x", {Lambda(1.0)}, c, "1",
      [](double x, const P& p) {
        return x < 0.0 ? x / std::sqrt(1.0 + Get(p, "lambda") * x * x) : x;
      },
      Constant(1.0), NonNegative("lambda")));
  rows.push_back(Elementwise(
      "square_nonlinearity", "Square nonlinearity",
      "-1 | x+x^2/4 | x-x^2/4 | 1 on (-inf,-2), [-2,0), [0,2], (2,inf)", {}, c,
      "1",
      [](double x, const P&) {
        if (x < -2.0) return -1.0;
        if (x < 0.0) return x + x * x / 4.0;
        if (x <= 2.0) return x - x * x / 4.0;
        return 1.0;
      },
      Constant(1.0)));
  rows.push_back(Elementwise(
      "bent_identity", "Bent identity",
      "2/3*lambda*(x+(sqrt(1+x^2)-1)/2)", {Lambda(0.75)}, c,
      "lambda if 3/7<=lambda<=1",
      [](double x, const P& p) {
        return 2.0 / 3.0 * Get(p, "lambda") *
               (x + (std::sqrt(1.0 + x * x) - 1.0) / 2.0);
      },
      [](const P& p) -> std::optional<double> {
        const double l = Get(p, "lambda");
        if (l >= 3.0 / 7.0 && l <= 1.0) return l;
        return std::nullopt;
      }));
  rows.push_back(Elementwise(
      "soft_exponential", "Soft exponential",
      "x if lambda=0 else lambda+(exp(lambda*x)-1)/lambda",
      {Lambda(0.0, "shape, >= 0")}, c, "1",
      [](double x, const P& p) {
        const double l = Get(p, "lambda");
        if (l == 0.0) return x;
        return l + std::expm1(l * x) / l;
      },
      Constant(1.0),
      [](const P& p) {
        // The negative branch is a logarithm defined on a half-line only.
        if (Get(p, "lambda") < 0.0) {
          throw InvalidInput(
              "parameter lambda must be >= 0 (negative branch is not defined "
              "on all of R)");
        }
      }));
  rows.push_back(Elementwise(
      "soft_clipping", "Soft clipping",
      "log((1+exp(lambda*x))/(1+exp(lambda*(x-1))))/lambda",
      {Lambda(1.0, "sharpness, > 0")}, GammaRule::kEstimate, "estimate",
      [](double x, const P& p) {
        const double l = Get(p, "lambda");
        return (Softplus(l * x) - Softplus(l * (x - 1.0))) / l;
      },
      nullptr, Positive("lambda")));
  rows.push_back(NonElementwise(
      "softsign_vector", "Softsign (vector)", "x/(1+|x|)",
      Arity::kVector, {}, c, "1",
      [](const Vec& x, const P&) { return Vec(x / (1.0 + x.norm())); },
      Constant(1.0)));
  rows.push_back(Elementwise("sinusoid", "Sinusoid", "sin(x)", {}, c,
                             "1",
                             [](double x, const P&) { return std::sin(x); },
                             Constant(1.0)));
  rows.push_back(Elementwise(
      "sinc", "Sinc", "sin(x)/x, 1 at 0", {}, c, "1",
      [](double x, const P&) { return x == 0.0 ? 1.0 : std::sin(x) / x; },
      Constant(1.0)));
  rows.push_back(Elementwise(
      "piecewise_linear", "Piecewise linear",
      "0 | x+1/2 | 1 on x<=-1/2, |x|<1/2, x>=1/2", {}, c, "1",
      [](double x, const P&) {
        if (x <= -0.5) return 0.0;
        if (x < 0.5) return x + 0.5;
        return 1.0;
      },
      Constant(1.0)));
  rows.push_back(Elementwise(
      "sinlu", "Sinu-sigmoidal linear unit",
      "(x+lambda*sin(alpha*x))*sigmoid(x)",
      {Lambda(1.0), {"alpha", 1.0, "frequency"}}, GammaRule::kEstimate,
      "estimate", [](double x, const P& p) {
        return (x + Get(p, "lambda") * std::sin(Get(p, "alpha") * x)) *
               Sigmoid(x);
      }));
  rows.push_back(Elementwise(
      "cloglog", "Complementary log-log", "1-exp(-exp(x))", {}, c,
      "3/4", [](double x, const P&) { return -std::expm1(-std::exp(x)); },
      Constant(0.75)));
  // tanh(x/2) is 1/2-Lipschitz, so promotion gives (1 + 1/2)/2.
  rows.push_back(Elementwise(
      "bipolar_sigmoid", "Bipolar sigmoid",
      "(1-exp(-x))/(1+exp(-x))", {}, GammaRule::kDerived,
      "3/4 (Lipschitz 1/2)",
      [](double x, const P&) { return std::tanh(x / 2.0); }, Constant(0.75)));
  rows.push_back(Elementwise(
      "hard_tanh", "Hard tanh", "max(-1,min(1,x))", {}, c, "1",
      [](double x, const P&) { return std::clamp(x, -1.0, 1.0); },
      Constant(1.0)));
  rows.push_back(Elementwise("absolute", "Absolute value", "|x|", {}, c,
                             "1",
                             [](double x, const P&) { return std::abs(x); },
                             Constant(1.0)));
  rows.push_back(Elementwise(
      "logit", "Logit", "log(x/(1-x))/10, x clamped to [1/4,3/4]", {}, c,
      "3/4",
      [](double x, const P&) {
        const double u = std::clamp(x, 0.25, 0.75);
        return std::log(u / (1.0 - u)) / 10.0;
      },
      Constant(0.75)));
  rows.push_back(Elementwise(
      "probit_softsign", "Softsign (probit)",
      "softsign(Phi^-1(x)), -1/+1 outside (0,1)", {}, c, "9/10",
      [](double x, const P&) {
        if (x <= 0.0) return -1.0;
        if (x >= 1.0) return 1.0;
        return Softsign(std::numbers::sqrt2 *
                        boost::math::erf_inv(2.0 * x - 1.0));
      },
      Constant(0.9)));
  rows.push_back(Elementwise(
      "linear_gaussian", "Linear Gaussian", "x*exp(-x^2)", {}, c,
      "(2+sqrt(e))/4",
      [](double x, const P&) { return x * std::exp(-x * x); },
      Constant((2.0 + std::sqrt(std::numbers::e)) / 4.0)));

  Row attention_softmax;
  attention_softmax.entry = {"attention_softmax",
               "Attention-based",
               "softmax(lambda*r0(x))",
               Arity::kVector,
               {Lambda(0.5, "softmax scale")},
               GammaRule::kCompose,
               "compose"};
  rows.push_back(attention_softmax);
  Row attention_gaussian;
  attention_gaussian.entry = {"attention_linear_gaussian",
               "Attention-based",
               "linear_gaussian(softmax(lambda*r0(x)))",
               Arity::kVector,
               {Lambda(0.5, "softmax scale")},
               GammaRule::kCompose,
               "compose"};
  rows.push_back(attention_gaussian);
  return rows;
}

const std::vector<Row>& Rows() {
  static const std::vector<Row> rows = BuildRows();
  return rows;
}

const Row& FindRow(std::string_view name) {
  for (const auto& r : Rows()) {
    if (r.entry.name == name) return r;
  }
  std::string msg = "unknown activation '" + std::string(name) + "'; valid: ";
  bool first = true;
  for (const auto& r : Rows()) {
    if (!first) msg += ", ";
    msg += r.entry.name;
    first = false;
  }
  throw InvalidInput(msg);
}

P FillParams(const CatalogEntry& e, const P& given) {
  P out;
  for (const auto& ps : e.params) out[ps.name] = ps.default_value;
  for (const auto& [k, v] : given) {
    if (!out.count(k)) {
      throw InvalidInput("activation '" + e.name + "' has no parameter '" + k +
                         "'");
    }
    if (!std::isfinite(v)) {
      throw InvalidInput("activation '" + e.name + "': parameter '" + k +
                         "' must be finite");
    }
    out[k] = v;
  }
  return out;
}

VecMap MakeEval(const Row& row, const P& params) {
  if (row.scalar) {
    return [f = row.scalar, params](const Vec& x) {
      Vec y(x.size());
      for (Index i = 0; i < x.size(); ++i) y[i] = f(x[i], params);
      return y;
    };
  }
  return [f = row.vector, params](const Vec& x) {
    if (x.size() == 0) throw InvalidInput("activation: empty input");
    return f(x, params);
  };
}

std::string Fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void Estimate(ActivationSpec& spec, Index dim,
              const ActivationOptions& options) {
  EstimateOptions eo;
  eo.samples = options.sampling.pairs;
  eo.seed = options.sampling.seed;
  eo.tol = options.sampling.tol;
  const auto est = EstimateGamma(spec.eval,
                                 Vec::Constant(dim, options.sampling.box_lo),
                                 Vec::Constant(dim, options.sampling.box_hi), eo);
  spec.lipschitz_estimate = est.lipschitz;
  spec.certificate = est.certificate;
  if (!est.certifiable()) {
    if (!spec.note.empty()) spec.note += "; ";
    spec.note += "not certifiable on the sampled box (Lipschitz estimate " +
                 Fmt(est.lipschitz) + ")";
  }
}

ActivationSpec MakeComposite(const Row& row, const P& params,
                             const ActivationOptions& options) {
  ActivationSpec inner =
      options.inner ? *options.inner
                    : MakeActivation("linear", {{"lambda", 0.5}}, options);
  if (inner.arity == Arity::kReduce) {
    throw InvalidInput(row.entry.name + ": inner map must not reduce dimension");
  }
  std::vector<ActivationSpec> chain;  // outermost first
  if (row.entry.name == "attention_linear_gaussian") {
    chain.push_back(MakeActivation("linear_gaussian", {}, options));
  }
  chain.push_back(
      MakeActivation("softmax", {{"lambda", params.at("lambda")}}, options));
  chain.push_back(inner);

  ActivationSpec spec;
  spec.kind = row.entry.name;
  spec.params = params;
  spec.arity = Arity::kVector;
  spec.rule = GammaRule::kCompose;
  spec.eval = [chain](const Vec& x) {
    Vec v = x;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) v = it->eval(v);
    return v;
  };
  std::vector<double> gammas;
  for (const auto& s : chain) {
    if (!s.certified()) {
      spec.note = "component '" + s.kind + "' is not certified";
      Estimate(spec, options.vector_dim, options);
      return spec;
    }
    gammas.push_back(s.certificate->gamma());
  }
  spec.certificate = GammaCertificate::Derived(ComposedGamma(gammas));
  return spec;
}

}  // namespace

std::string_view ToString(Arity a) {
  switch (a) {
    case Arity::kElementwise:
      return "elementwise";
    case Arity::kVector:
      return "vector";
    case Arity::kReduce:
      return "reduce";
  }
  return "unknown";
}

std::string_view ToString(GammaRule r) {
  switch (r) {
    case GammaRule::kClosedForm:
      return "closed_form";
    case GammaRule::kDerived:
      return "derived";
    case GammaRule::kEstimate:
      return "estimate";
    case GammaRule::kCompose:
      return "compose";
  }
  return "unknown";
}

const std::vector<CatalogEntry>& Catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> out;
    for (const auto& r : Rows()) out.push_back(r.entry);
    return out;
  }();
  return entries;
}

const CatalogEntry& FindCatalogEntry(std::string_view name) {
  return FindRow(name).entry;
}

std::vector<std::string> CatalogNames() {
  std::vector<std::string> names;
  for (const auto& e : Catalog()) names.push_back(e.name);
  return names;
}

AveragedOperator ActivationSpec::Operator() const {
  if (!certificate) {
    throw NumericalError("activation '" + kind + "' is not certified" +
                         (note.empty() ? "" : ": " + note));
  }
  return AveragedOperator(kind, dim(), dim(), eval, *certificate);
}

ActivationSpec MakeActivation(std::string_view kind, const ActivationParams& params,
                              const ActivationOptions& options) {
  const Row& row = FindRow(kind);
  const P filled = FillParams(row.entry, params);
  if (row.validate) row.validate(filled);
  if (row.entry.rule == GammaRule::kCompose) {
    return MakeComposite(row, filled, options);
  }

  ActivationSpec spec;
  spec.kind = row.entry.name;
  spec.params = filled;
  spec.arity = row.entry.arity;
  spec.rule = row.entry.rule;
  spec.eval = MakeEval(row, filled);
  const Index dim = spec.arity == Arity::kVector ? options.vector_dim : 1;

  if (row.gamma) spec.claimed_gamma = row.gamma(filled);
  if (!spec.claimed_gamma) {
    if (row.entry.rule != GammaRule::kEstimate) {
      spec.note = "parameters outside the closed-form regime (" +
                  row.entry.gamma_formula + ")";
    }
    Estimate(spec, dim, options);
    return spec;
  }

  const double g = *spec.claimed_gamma;
  auto certify = [&] {
    return row.entry.rule == GammaRule::kDerived
               ? GammaCertificate::Derived(g)
               : GammaCertificate::ClosedForm(g);
  };
  if (!options.verify_claim) {
    spec.certificate = certify();
    return spec;
  }
  const auto pairs = SamplePairs(dim, options.sampling, "activation/" + spec.kind);
  const auto report = CheckAveraged(spec.eval, g, pairs, options.sampling.tol);
  if (report.pass) {
    spec.certificate = certify();
    return spec;
  }
  spec.note = "claimed gamma " + Fmt(g) +
              " fails the sampled check (worst violation " +
              Fmt(report.worst_violation) + "); downgraded to numeric estimate";
  Estimate(spec, dim, options);
  return spec;
}

double EvalScalar(const ActivationSpec& spec, double x) {
  if (spec.arity != Arity::kElementwise) {
    throw InvalidInput("EvalScalar: '" + spec.kind + "' is not elementwise");
  }
  return spec.eval(Vec::Constant(1, x))[0];
}

}  // namespace avgnet
