#pragma once

#include "avgnet/network.hpp"

#include <string>
#include <vector>

namespace avgnet {

// Rows are sequence positions, columns embedding dimensions.
using TokenMatrix = Mat;

enum class SoftmaxMode {
  kGlobal,  // every lower-triangular entry over the sum of all of them
  kRowwise,      // standard causal softmax, each row sums to 1
};

std::string_view ToString(SoftmaxMode m);
SoftmaxMode ParseSoftmaxMode(std::string_view s);

// Entries above the diagonal are 0 in both modes.
Mat MaskedSoftmax(const Mat& A, SoftmaxMode mode);

struct AttentionHead {
  Mat w_qk;  // d x d
  Mat w_ov;  // d x d
};

// softmax*(x w_qk x^T) x w_ov^T for one head.
TokenMatrix HeadOutput(const TokenMatrix& x, const AttentionHead& head,
                       SoftmaxMode mode);

// x + sum over heads of HeadOutput.
TokenMatrix AttentionLayer(const TokenMatrix& x, const std::vector<AttentionHead>& heads,
                           SoftmaxMode mode);

// Row-wise x + r(W x + b).
TokenMatrix FeedForward(const TokenMatrix& x, const LayerSpec& ff);

// rho_i + zeta_i (x_i - mean) / sqrt(nu + eps), nu the sample variance with
// denominator size - 1.
Vec LayerNorm(const Vec& x, const Vec& rho, const Vec& zeta, double eps);

struct DecoderBlock {
  std::vector<AttentionHead> heads;
  LayerSpec ff;  // d x d
  Vec rho;
  Vec zeta;
  double eps = 1.0;
  SoftmaxMode mode = SoftmaxMode::kGlobal;

  void Validate(Index d) const;
};

// Layer norm (row-wise) of feed-forward of attention.
TokenMatrix BlockMap(const DecoderBlock& block, const TokenMatrix& x);

// Blocks applied in list order.
TokenMatrix DecoderMap(const std::vector<DecoderBlock>& blocks, const TokenMatrix& x);

// Column-major flattening used to iterate on token matrices.
Vec Flatten(const TokenMatrix& x);
TokenMatrix Unflatten(const Vec& v, Index rows, Index cols);

struct BlockDiagnostic {
  bool certifiable = false;
  double gamma = 1.0;      // when certifiable
  double lipschitz = 0.0;  // sampled estimate
};

struct JacobianProbe {
  std::size_t points = 0;
  double max_jacobian_change_ratio = 0.0;  // max |J(p_k+1) - J(p_k)| / |p_k+1 - p_k|
};

struct DecoderFixpointOptions {
  double tol = 1e-8;
  std::size_t max_iter = 100000;
  std::optional<RelaxationSchedule> schedule;  // default min(1, 1/(2 gamma))
  double box_half_width = 2.0;  // sampling box [-w, w]^(n d) around 0
  std::size_t samples = 10000;
  std::uint64_t seed = kDefaultSeed;
  bool probe_jacobian = true;
};

struct DecoderFixpointResult {
  std::vector<BlockDiagnostic> blocks;
  std::optional<double> gamma;  // certified gamma of the whole decoder
  bool unchecked = false;
  IterationTrace trace;
  TokenMatrix fixed_point;
  // Per-block game check at the final iterate: block states z_k = B_k(z_{k-1})
  // with z_0 = z_n; residual |z_k - B_k(z_{k-1})|.
  std::vector<double> block_residuals;
  bool equilibrium = false;
  std::optional<JacobianProbe> jacobian;
  std::vector<std::string> warnings;
};

/// Certifies each block by sampled estimate, composes the certificates and
/// runs KM on the decoder. Without a certificate the iteration runs in
/// unchecked mode with a warning.
DecoderFixpointResult DecoderFixpoint(const std::vector<DecoderBlock>& blocks,
                                      const TokenMatrix& x0,
                                      const DecoderFixpointOptions& options = {});

// Finite-difference Jacobian probe of the attention layer along a straight
// path from x to x + direction.
JacobianProbe ProbeAttentionJacobian(const std::vector<AttentionHead>& heads,
                                     SoftmaxMode mode, const TokenMatrix& x,
                                     const TokenMatrix& direction,
                                     std::size_t points = 8);

}  // namespace avgnet
