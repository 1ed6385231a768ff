#include "fixtures.hpp"

#include <algorithm>
#include <random>

namespace avgnet::testing {

Mat RandomMatrixWithNorm(Rng& rng, Index rows, Index cols, double norm) {
  Mat w = StandardNormal(rng, rows, cols);
  const double s = Eigen::JacobiSVD<Mat>(w).singularValues()[0];
  return w * (norm / s);
}

namespace {

ActivationSpec Activation(const std::string& kind) {
  ActivationSpec spec = MakeActivation(kind);
  if (!spec.certified()) throw std::logic_error("fixture activation not certified: " + kind);
  return spec;
}

}  // namespace

NetworkSpec RandomCertifiedNetwork(std::uint64_t seed, std::size_t index, double norm_lo,
                                   double norm_hi) {
  static const std::vector<std::string> kInner = {"tanh",  "relu",     "softsign", "arctan",
                                                  "linear", "sigmoid", "hard_tanh", "elu"};
  static const std::vector<std::string> kBounded = {"tanh", "sigmoid", "softsign",
                                                    "hard_tanh", "arctan"};
  Rng rng = MakeRng(seed, "random_network/" + std::to_string(index));
  std::uniform_int_distribution<int> layers_dist(1, 4);
  std::uniform_int_distribution<int> width_dist(1, 8);
  std::uniform_real_distribution<double> norm_dist(norm_lo, norm_hi);
  std::uniform_real_distribution<double> bias_dist(-1.0, 1.0);

  const int L = layers_dist(rng);
  std::vector<Index> widths(L + 1);
  for (auto& w : widths) w = width_dist(rng);
  widths[L] = widths[0];

  NetworkSpec net;
  net.x0 = Vec::NullaryExpr(widths[0], [&] { return 5.0 * bias_dist(rng); });
  for (int l = 0; l < L; ++l) {
    LayerSpec layer;
    layer.W = RandomMatrixWithNorm(rng, widths[l + 1], widths[l], norm_dist(rng));
    layer.b = Vec::NullaryExpr(widths[l + 1], [&] { return bias_dist(rng); });
    const auto& pool = l + 1 == L ? kBounded : kInner;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    layer.activation = Activation(pool[pick(rng)]);
    net.layers.push_back(std::move(layer));
  }
  net.Validate();
  return net;
}

NetworkSpec RandomPotentialNetwork(std::uint64_t seed, std::size_t index) {
  static const std::vector<std::string> kPool = {"identity", "sigmoid", "softsign"};
  Rng rng = MakeRng(seed, "potential_network/" + std::to_string(index));
  std::uniform_int_distribution<int> layers_dist(1, 3);
  std::uniform_int_distribution<int> width_dist(1, 5);
  std::uniform_real_distribution<double> norm_dist(0.3, 0.9);
  std::uniform_real_distribution<double> bias_dist(-1.0, 1.0);
  const int L = layers_dist(rng);
  std::vector<Index> widths(L + 1);
  for (auto& w : widths) w = width_dist(rng);
  widths[L] = widths[0];
  NetworkSpec net;
  net.x0 = Vec::NullaryExpr(widths[0], [&] { return 3.0 * bias_dist(rng); });
  for (int l = 0; l < L; ++l) {
    LayerSpec layer;
    layer.W = RandomMatrixWithNorm(rng, widths[l + 1], widths[l], norm_dist(rng));
    layer.b = Vec::NullaryExpr(widths[l + 1], [&] { return bias_dist(rng); });
    // Keep the last layer bounded so a fixed point exists.
    std::uniform_int_distribution<std::size_t> pick(l + 1 == L ? 1 : 0, kPool.size() - 1);
    layer.activation = Activation(kPool[pick(rng)]);
    net.layers.push_back(std::move(layer));
  }
  net.Validate();
  return net;
}

Vec PolishFixedPoint(const NetworkSpec& net, const IterationTrace& trace) {
  const VecMap op = NetworkMap(net);
  const double lambda = trace.lambdas.empty() ? 0.5 : trace.lambdas.back();
  Vec x = trace.final_iterate();
  double best = (op(x) - x).norm();
  for (int i = 0; i < 200000 && best > 0.0; ++i) {
    const Vec next = x + lambda * (op(x) - x);
    const double r = (op(next) - next).norm();
    x = next;
    if (r >= best && r < 1e-14) break;
    best = std::min(best, r);
  }
  return x;
}

NetworkSpec TeacherNetwork(std::uint64_t seed, Index dim, std::size_t layers,
                           const std::string& activation, double scale) {
  Rng rng = MakeRng(seed, "teacher");
  NetworkSpec net;
  net.x0 = Vec::Zero(dim);
  for (std::size_t l = 0; l < layers; ++l) {
    LayerSpec layer;
    layer.W = scale * StandardNormal(rng, dim, dim);
    layer.b = 0.5 * scale * StandardNormal(rng, dim);
    layer.activation = MakeActivation(activation);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

std::vector<Sample> TeacherSamples(const NetworkSpec& teacher, std::size_t count,
                                   std::uint64_t seed, const std::string& consumer) {
  Rng rng = MakeRng(seed, consumer);
  const Vec lo = Vec::Constant(teacher.dim(), -1.0);
  const Vec hi = Vec::Constant(teacher.dim(), 1.0);
  std::vector<Sample> out;
  for (std::size_t t = 0; t < count; ++t) {
    Sample s;
    s.x = UniformInBox(rng, lo, hi);
    s.y_L = Forward(teacher, s.x).back();
    out.push_back(std::move(s));
  }
  return out;
}

NetworkSpec ZeroStudent(const NetworkSpec& teacher) {
  NetworkSpec student = teacher;
  for (auto& layer : student.layers) {
    layer.W.setZero();
    layer.b.setZero();
  }
  return student;
}

}  // namespace avgnet::testing
