#include "avgnet/llm.hpp"

#include <gtest/gtest.h>

namespace avgnet {
namespace {

TEST(MaskedSoftmaxTest, GlobalAndRowwiseNormalization) {
  Rng rng = MakeRng(4, "test/softmax");
  const Mat a = StandardNormal(rng, 4, 4);
  const Mat g = MaskedSoftmax(a, SoftmaxMode::kGlobal);
  const Mat r = MaskedSoftmax(a, SoftmaxMode::kRowwise);
  EXPECT_NEAR(g.sum(), 1.0, 1e-12);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(r.row(i).sum(), 1.0, 1e-12);
  for (Index i = 0; i < 4; ++i) {
    for (Index j = i + 1; j < 4; ++j) {
      EXPECT_EQ(g(i, j), 0.0);
      EXPECT_EQ(r(i, j), 0.0);
    }
  }
}

TEST(MaskedSoftmaxTest, LargeScoresStayFinite) {
  Mat a = Mat::Constant(3, 3, 800.0);
  a(2, 0) = -900.0;
  EXPECT_TRUE(MaskedSoftmax(a, SoftmaxMode::kGlobal).allFinite());
  EXPECT_TRUE(MaskedSoftmax(a, SoftmaxMode::kRowwise).allFinite());
}

TEST(MaskedSoftmaxTest, FirstRowAttendsToItself) {
  const Mat a = Mat::Random(3, 3);
  EXPECT_DOUBLE_EQ(MaskedSoftmax(a, SoftmaxMode::kRowwise)(0, 0), 1.0);
}

TEST(AttentionTest, ZeroWeightsGiveIdentity) {
  const Mat x = Mat::Random(3, 4);
  const std::vector<AttentionHead> heads = {{Mat::Zero(4, 4), Mat::Zero(4, 4)}};
  EXPECT_EQ(AttentionLayer(x, heads, SoftmaxMode::kRowwise), x);
}

TEST(AttentionTest, HeadShapeChecked) {
  const Mat x = Mat::Random(3, 4);
  const AttentionHead bad{Mat::Zero(3, 3), Mat::Zero(4, 4)};
  EXPECT_THROW(HeadOutput(x, bad, SoftmaxMode::kRowwise), InvalidInput);
}

TEST(AttentionTest, SingleTokenHeadIsValueMap) {
  // One token: softmax weight 1, output x w_ov^T.
  Mat x(1, 2);
  x << 1.0, 2.0;
  Mat w_ov(2, 2);
  w_ov << 0.0, 1.0, 3.0, 0.0;
  const AttentionHead head{Mat::Identity(2, 2), w_ov};
  const Mat out = HeadOutput(x, head, SoftmaxMode::kGlobal);
  EXPECT_DOUBLE_EQ(out(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(out(0, 1), 3.0);
}

TEST(LayerNormTest, HandExample) {
  Vec x(2);
  x << 1.0, 3.0;
  const Vec y = LayerNorm(x, Vec::Zero(2), Vec::Ones(2), 1e-12);
  EXPECT_NEAR(y[0], -0.7071, 1e-4);
  EXPECT_NEAR(y[1], 0.7071, 1e-4);
}

TEST(LayerNormTest, SizeOneRejected) {
  EXPECT_THROW(LayerNorm(Vec::Ones(1), Vec::Zero(1), Vec::Ones(1), 1.0), InvalidInput);
}

TEST(FlattenTest, RoundTrip) {
  const Mat x = Mat::Random(3, 5);
  EXPECT_EQ(Unflatten(Flatten(x), 3, 5), x);
}

DecoderBlock ScaledBlock(Index d, double scale) {
  Rng rng = MakeRng(6, "test/block");
  DecoderBlock b;
  b.heads.push_back({scale * StandardNormal(rng, d, d), scale * StandardNormal(rng, d, d)});
  b.ff.W = scale * StandardNormal(rng, d, d);
  b.ff.b = Vec::Zero(d);
  b.ff.activation = MakeActivation("tanh");
  b.rho = Vec::Zero(d);
  b.zeta = Vec::Constant(d, 0.5);
  return b;
}

TEST(DecoderFixpointTest, ZeroBlockFixedPointInOneStep) {
  DecoderBlock b = ScaledBlock(3, 0.0);
  b.zeta = Vec::Zero(3);
  DecoderFixpointOptions options;
  options.samples = 500;
  options.schedule = RelaxationSchedule::Constant(1.0);
  const auto res = DecoderFixpoint({b}, Mat::Random(2, 3), options);
  EXPECT_TRUE(res.trace.converged);
  EXPECT_EQ(res.fixed_point, Mat::Zero(2, 3));
  EXPECT_EQ(res.trace.residuals.size(), 2u);
}

TEST(DecoderFixpointTest, SmallWeightsCertify) {
  DecoderFixpointOptions options;
  options.samples = 2000;
  const auto res = DecoderFixpoint({ScaledBlock(3, 1e-3)}, Mat::Random(2, 3), options);
  ASSERT_TRUE(res.gamma.has_value());
  EXPECT_TRUE(res.trace.converged);
  EXPECT_TRUE(res.equilibrium);
}

TEST(DecoderFixpointTest, LargeWeightsNotCertifiable) {
  DecoderFixpointOptions options;
  options.samples = 2000;
  options.max_iter = 50;
  const auto res = DecoderFixpoint({ScaledBlock(3, 10.0)}, Mat::Random(2, 3), options);
  EXPECT_FALSE(res.blocks[0].certifiable);
  EXPECT_TRUE(res.unchecked);
  EXPECT_FALSE(res.warnings.empty());
}

TEST(JacobianProbeTest, ZeroHeadsHaveConstantJacobian) {
  const std::vector<AttentionHead> heads = {{Mat::Zero(2, 2), Mat::Zero(2, 2)}};
  const auto probe = ProbeAttentionJacobian(heads, SoftmaxMode::kRowwise, Mat::Random(2, 2),
                                            Mat::Ones(2, 2), 4);
  EXPECT_LT(probe.max_jacobian_change_ratio, 1e-6);
}

}  // namespace
}  // namespace avgnet
