#include "avgnet/llm.hpp"

#include "avgnet/format.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

namespace avgnet {

std::string_view ToString(SoftmaxMode m) {
  return m == SoftmaxMode::kGlobal ? "global" : "rowwise";
}

SoftmaxMode ParseSoftmaxMode(std::string_view s) {
  if (s == "global") return SoftmaxMode::kGlobal;
  if (s == "rowwise") return SoftmaxMode::kRowwise;
  throw InvalidInput("unknown softmax mode '" + std::string(s) +
                     "'; valid: global, rowwise");
}

Mat MaskedSoftmax(const Mat& A, SoftmaxMode mode) {
  if (A.rows() != A.cols()) throw InvalidInput("masked softmax needs a square matrix");
  const Index n = A.rows();
  Mat out = Mat::Zero(n, n);
  if (n == 0) return out;
  if (mode == SoftmaxMode::kGlobal) {
    double m = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j <= i; ++j) m = std::max(m, A(i, j));
    }
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j <= i; ++j) {
        out(i, j) = std::exp(A(i, j) - m);
        sum += out(i, j);
      }
    }
    return out / sum;
  }
  for (Index i = 0; i < n; ++i) {
    const double m = A.row(i).head(i + 1).maxCoeff();
    double sum = 0.0;
    for (Index j = 0; j <= i; ++j) {
      out(i, j) = std::exp(A(i, j) - m);
      sum += out(i, j);
    }
    out.row(i).head(i + 1) /= sum;
  }
  return out;
}

namespace {

// The output-value factor is applied transposed; one place to change it.
Mat OvFactor(const AttentionHead& head) { return head.w_ov.transpose(); }

void CheckHead(const AttentionHead& h, Index d) {
  if (h.w_qk.rows() != d || h.w_qk.cols() != d || h.w_ov.rows() != d ||
      h.w_ov.cols() != d) {
    throw InvalidInput("attention head matrices must be " + std::to_string(d) + "x" +
                       std::to_string(d));
  }
}

}  // namespace

TokenMatrix HeadOutput(const TokenMatrix& x, const AttentionHead& head,
                       SoftmaxMode mode) {
  CheckHead(head, x.cols());
  const Mat scores = x * head.w_qk * x.transpose();
  return MaskedSoftmax(scores, mode) * x * OvFactor(head);
}

TokenMatrix AttentionLayer(const TokenMatrix& x, const std::vector<AttentionHead>& heads,
                           SoftmaxMode mode) {
  TokenMatrix out = x;
  for (const auto& h : heads) out += HeadOutput(x, h, mode);
  return out;
}

TokenMatrix FeedForward(const TokenMatrix& x, const LayerSpec& ff) {
  if (ff.W.rows() != x.cols() || ff.W.cols() != x.cols() || ff.b.size() != x.cols()) {
    throw InvalidInput("feed-forward layer must be d x d with d = token width");
  }
  TokenMatrix out = x;
  for (Index i = 0; i < x.rows(); ++i) {
    const Vec row = x.row(i).transpose();
    out.row(i) += ff.Apply(row).transpose();
  }
  return out;
}

Vec LayerNorm(const Vec& x, const Vec& rho, const Vec& zeta, double eps) {
  if (x.size() < 2) throw InvalidInput("layer norm needs at least 2 entries");
  if (rho.size() != x.size() || zeta.size() != x.size()) {
    throw InvalidInput("layer norm parameters must match the input size");
  }
  if (!(eps > 0.0)) throw InvalidInput("layer norm eps must be > 0");
  const double mean = x.mean();
  const Vec centered = x.array() - mean;
  const double nu = centered.squaredNorm() / static_cast<double>(x.size() - 1);
  return rho + (zeta.array() * centered.array()).matrix() / std::sqrt(nu + eps);
}

void DecoderBlock::Validate(Index d) const {
  for (const auto& h : heads) CheckHead(h, d);
  if (ff.W.rows() != d || ff.W.cols() != d || ff.b.size() != d) {
    throw InvalidInput("feed-forward layer must be d x d");
  }
  if (ff.activation.arity == Arity::kReduce && d != 1) {
    throw InvalidInput("feed-forward activation must keep the dimension");
  }
  if (rho.size() != d || zeta.size() != d) throw InvalidInput("rho/zeta must have size d");
  if (!(eps > 0.0)) throw InvalidInput("layer norm eps must be > 0");
}

TokenMatrix BlockMap(const DecoderBlock& block, const TokenMatrix& x) {
  const TokenMatrix ff = FeedForward(AttentionLayer(x, block.heads, block.mode), block.ff);
  TokenMatrix out(ff.rows(), ff.cols());
  for (Index i = 0; i < ff.rows(); ++i) {
    out.row(i) = LayerNorm(ff.row(i).transpose(), block.rho, block.zeta, block.eps)
                     .transpose();
  }
  return out;
}

TokenMatrix DecoderMap(const std::vector<DecoderBlock>& blocks, const TokenMatrix& x) {
  TokenMatrix y = x;
  for (const auto& b : blocks) y = BlockMap(b, y);
  return y;
}

Vec Flatten(const TokenMatrix& x) {
  return Eigen::Map<const Vec>(x.data(), x.size());
}

TokenMatrix Unflatten(const Vec& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw InvalidInput("Unflatten: size mismatch");
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

JacobianProbe ProbeAttentionJacobian(const std::vector<AttentionHead>& heads,
                                     SoftmaxMode mode, const TokenMatrix& x,
                                     const TokenMatrix& direction, std::size_t points) {
  if (points < 2) throw InvalidInput("Jacobian probe needs at least 2 points");
  const Index rows = x.rows();
  const Index cols = x.cols();
  auto f = [&](const Vec& v) {
    return Flatten(AttentionLayer(Unflatten(v, rows, cols), heads, mode));
  };
  auto jacobian = [&](const Vec& p) {
    const double h = 1e-6;
    Mat J(p.size(), p.size());
    Vec q = p;
    for (Index j = 0; j < p.size(); ++j) {
      q[j] = p[j] + h;
      const Vec up = f(q);
      q[j] = p[j] - h;
      const Vec down = f(q);
      q[j] = p[j];
      J.col(j) = (up - down) / (2.0 * h);
    }
    return J;
  };
  JacobianProbe probe;
  probe.points = points;
  const Vec start = Flatten(x);
  const Vec dir = Flatten(direction);
  Mat prev = jacobian(start);
  for (std::size_t k = 1; k < points; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(points - 1);
    const double ds = 1.0 / static_cast<double>(points - 1);
    Mat cur = jacobian(start + s * dir);
    const double step = ds * dir.norm();
    if (step > 0.0) {
      probe.max_jacobian_change_ratio =
          std::max(probe.max_jacobian_change_ratio, (cur - prev).norm() / step);
    }
    prev = std::move(cur);
  }
  return probe;
}

DecoderFixpointResult DecoderFixpoint(const std::vector<DecoderBlock>& blocks,
                                      const TokenMatrix& x0,
                                      const DecoderFixpointOptions& options) {
  if (blocks.empty()) throw InvalidInput("decoder has no blocks");
  if (x0.rows() < 1 || x0.cols() < 2) {
    throw InvalidInput("token matrix needs >= 1 row and >= 2 columns");
  }
  for (const auto& b : blocks) b.Validate(x0.cols());
  const Index rows = x0.rows();
  const Index cols = x0.cols();
  const Index n = x0.size();

  DecoderFixpointResult result;
  EstimateOptions eo;
  eo.samples = options.samples;
  eo.seed = options.seed;
  const Vec lo = Vec::Constant(n, -options.box_half_width);
  const Vec hi = Vec::Constant(n, options.box_half_width);
  std::vector<double> gammas;
  bool all_certified = true;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const DecoderBlock& block = blocks[k];
    VecMap map = [block, rows, cols](const Vec& v) {
      return Flatten(BlockMap(block, Unflatten(v, rows, cols)));
    };
    const GammaEstimate est = EstimateGamma(map, lo, hi, eo);
    BlockDiagnostic diag;
    diag.lipschitz = est.lipschitz;
    diag.certifiable = est.certifiable();
    if (diag.certifiable) {
      diag.gamma = est.certificate->gamma();
      gammas.push_back(diag.gamma);
    } else {
      all_certified = false;
      result.warnings.push_back("block " + std::to_string(k + 1) +
                                " is not certifiable (Lipschitz estimate " +
                                FormatDouble(est.lipschitz) + ")");
    }
    result.blocks.push_back(diag);
  }
  if (all_certified) result.gamma = ComposedGamma(gammas);

  KmOptions km;
  km.tol = options.tol;
  km.max_iter = options.max_iter;
  km.unchecked = !all_certified;
  result.unchecked = km.unchecked;
  RelaxationSchedule schedule = RelaxationSchedule::Constant(0.5);
  if (options.schedule) {
    schedule = *options.schedule;
  } else if (result.gamma) {
    schedule = RelaxationSchedule::Constant(std::min(1.0, 1.0 / (2.0 * *result.gamma)));
  }
  if (result.unchecked) {
    spdlog::warn("decoder is not certified; iterating without the averagedness "
                 "guarantee");
  }
  VecMap decoder = [&blocks, rows, cols](const Vec& v) {
    return Flatten(DecoderMap(blocks, Unflatten(v, rows, cols)));
  };
  result.trace = KmIterate(decoder, result.gamma, Flatten(x0), schedule, km);
  for (const auto& w : result.trace.warnings) result.warnings.push_back(w);
  const Vec& last = result.trace.final_iterate();
  result.fixed_point = Unflatten(last, rows, cols);

  if (last.allFinite()) {
    const std::size_t nb = blocks.size();
    std::vector<TokenMatrix> states(nb);
    TokenMatrix z = result.fixed_point;
    for (std::size_t k = 0; k + 1 < nb; ++k) {
      z = BlockMap(blocks[k], z);
      states[k] = z;
    }
    states[nb - 1] = result.fixed_point;
    for (std::size_t k = 0; k < nb; ++k) {
      const TokenMatrix& input = states[(k + nb - 1) % nb];
      result.block_residuals.push_back((states[k] - BlockMap(blocks[k], input)).norm());
    }
    result.equilibrium = true;
    for (double r : result.block_residuals) {
      result.equilibrium = result.equilibrium && r <= options.tol;
    }
    if (options.probe_jacobian) {
      Rng rng = MakeRng(options.seed, "jacobian_probe");
      const TokenMatrix dir = StandardNormal(rng, rows, cols);
      result.jacobian =
          ProbeAttentionJacobian(blocks.front().heads, blocks.front().mode,
                                 result.fixed_point, dir);
    }
  }
  return result;
}

}  // namespace avgnet
