#include "avgnet/gram_schmidt.hpp"

#include "avgnet/operator_core.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

namespace avgnet {
namespace {

RandomVariableSample Constant(double a, double b) {
  Mat m(2, 2);
  m << a, b, a, b;
  return {m};
}

TEST(ProjectTest, Coefficient) {
  const auto xi = Constant(1, 0), xj = Constant(1, 1);
  EXPECT_DOUBLE_EQ(InnerProduct(xj, xi) / InnerProduct(xi, xi), 1.0);
  const auto p = Project(xi, xj);
  EXPECT_EQ(p.samples, xi.samples);
  Mat resid = xj.samples - p.samples;
  EXPECT_LE(std::abs(InnerProduct({resid}, xi)), 1e-12);
}

TEST(ProjectTest, SelfAndOrthogonal) {
  const auto x = Constant(2, 3);
  EXPECT_TRUE(Project(x, x).samples.isApprox(x.samples));
  EXPECT_EQ(Project(Constant(1, 0), Constant(0, 5)).samples, Mat::Zero(2, 2));
  EXPECT_THROW(Project(Constant(0, 0), x), InvalidInput);
}

TEST(GsNetworkRunTest, TwoVectorFixture) {
  const auto run = GsNetworkRun({Constant(1, 0), Constant(1, 1)});
  EXPECT_TRUE(run.orthonormal[0].samples.isApprox(Constant(1, 0).samples));
  EXPECT_TRUE(run.orthonormal[1].samples.isApprox(Constant(0, 1).samples));
  EXPECT_LE((run.gram - Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(GsNetworkRunTest, OrthonormalInputUnchanged) {
  const auto run = GsNetworkRun({Constant(1, 0), Constant(0, 1)});
  EXPECT_EQ(run.orthonormal[0].samples, Constant(1, 0).samples);
  EXPECT_EQ(run.orthonormal[1].samples, Constant(0, 1).samples);
}

TEST(GsNetworkRunTest, MatchesClassicalOracle) {
  Rng rng = MakeRng(8, "test/gs");
  GsFamily family;
  Mat stacked(300, 3);
  for (int k = 0; k < 3; ++k) {
    family.push_back({StandardNormal(rng, 300, 1)});
    stacked.col(k) = family.back().samples.col(0);
  }
  const auto run = GsNetworkRun(family);
  const Mat oracle = avgnet::testing::ClassicalGramSchmidt(stacked, 300.0);
  for (int k = 0; k < 3; ++k) {
    EXPECT_LE((run.orthonormal[k].samples.col(0) - oracle.col(k)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(GsNetworkRunTest, SpanPreserved) {
  Rng rng = MakeRng(9, "test/gs_span");
  GsFamily family;
  for (int k = 0; k < 3; ++k) family.push_back({StandardNormal(rng, 50, 2)});
  const auto run = GsNetworkRun(family);
  // members[k] = sum_{i <= k} r(i, k) orthonormal[i]
  for (int k = 0; k < 3; ++k) {
    Mat rebuilt = Mat::Zero(50, 2);
    for (int i = 0; i <= k; ++i) rebuilt += run.r(i, k) * run.orthonormal[i].samples;
    EXPECT_LE((rebuilt - family[k].samples).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GsNetworkRunTest, DependentFamilyRejected) {
  const auto x = Constant(1, 2);
  EXPECT_THROW(GsNetworkRun({x, Constant(2, 4)}), InvalidInput);
  EXPECT_THROW(GsNetworkRun({x, {x.samples * (1.0 + 1e-14)}}), InvalidInput);
}

TEST(IdempotenceTest, SmallSample) {
  Rng rng = MakeRng(10, "test/idem");
  GsFamily family;
  for (int k = 0; k < 3; ++k) family.push_back({StandardNormal(rng, 10, 1)});
  EXPECT_TRUE(IdempotenceCheck(family).idempotent);
}

TEST(BestLinearPredictorTest, ExactLinearRelation) {
  Rng rng = MakeRng(11, "test/blp");
  const Mat x = StandardNormal(rng, 40, 1);
  const Mat y = (3.0 * x.array() - 1.0).matrix();
  const auto p = BestLinearPredictor(x, y);
  EXPECT_NEAR(p.B(0, 0), 3.0, 1e-12);
  EXPECT_NEAR(p.intercept[0], -1.0, 1e-12);
  EXPECT_LE((p.fitted - y).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BestLinearPredictorTest, UncorrelatedGivesMean) {
  Mat x(4, 1), y(4, 1);
  x << 1, -1, 1, -1;
  y << 2, 2, 5, 5;
  const auto p = BestLinearPredictor(x, y);
  EXPECT_NEAR(p.B(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(p.intercept[0], 3.5, 1e-15);
}

TEST(BestLinearPredictorTest, SingularCovarianceRejected) {
  const Mat x = Mat::Ones(5, 1);
  EXPECT_THROW(BestLinearPredictor(x, x), InvalidInput);
}

TEST(ProjectionOperatorTest, Nonexpansive) {
  // Projection onto span{z} in the empirical space, as a map on R^N.
  const Vec z = Vec::LinSpaced(6, -1.0, 2.0);
  const VecMap proj = [z](const Vec& v) -> Vec { return (v.dot(z) / z.dot(z)) * z; };
  SamplingOptions s;
  s.pairs = 1000;
  EXPECT_TRUE(CheckAveraged(proj, 1.0, SamplePairs(6, s, "test/gs_proj"), 1e-9).pass);
}

}  // namespace
}  // namespace avgnet
