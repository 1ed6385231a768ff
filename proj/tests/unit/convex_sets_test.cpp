#include "avgnet/convex_sets.hpp"

#include <gtest/gtest.h>

namespace avgnet {
namespace {

Vec V(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

TEST(ConvexSetTest, BoxProjectionClamps) {
  const auto box = ConvexSet::Box(V(0, 0), V(2, 2));
  EXPECT_TRUE(box.Project(V(5, -3)).isApprox(V(2, 0)));
  EXPECT_TRUE(box.Contains(V(1, 1), 0.0));
}

TEST(ConvexSetTest, BallProjection) {
  const auto ball = ConvexSet::Ball(V(0, 0), 1.0);
  EXPECT_TRUE(ball.Project(V(3, 4)).isApprox(V(0.6, 0.8)));
  EXPECT_EQ(ball.Project(V(0.1, 0.1)), V(0.1, 0.1));
}

TEST(ConvexSetTest, ZeroRadiusBallIsAPoint) {
  const auto point = ConvexSet::Ball(V(1, 1), 0.0);
  EXPECT_EQ(point.Project(V(-4, 9)), V(1, 1));
}

TEST(ConvexSetTest, HalfspaceProjection) {
  const auto h = ConvexSet::Halfspace(V(1, 1), 2.0);
  EXPECT_TRUE(h.Project(V(0, 0)).isApprox(V(1, 1)));
  EXPECT_EQ(h.Project(V(3, 3)), V(3, 3));
}

TEST(ConvexSetTest, AffineSubspace) {
  Mat a(1, 2);
  a << 1.0, -1.0;
  const auto s = ConvexSet::AffineSubspace(a, Vec::Zero(1));
  EXPECT_TRUE(s.Project(V(2, 0)).isApprox(V(1, 1)));
  Mat bad(2, 2);
  bad << 1, 1, 1, 1;
  EXPECT_THROW(ConvexSet::AffineSubspace(bad, V(0, 1)), InvalidInput);
}

TEST(ConvexSetTest, ProjectionsAreFirmlyNonexpansive) {
  const auto ball = ConvexSet::Ball(V(1, -1), 2.0);
  const auto op = ball.AsOperator();
  EXPECT_DOUBLE_EQ(op.gamma(), 0.5);
  SamplingOptions s;
  s.pairs = 2000;
  EXPECT_TRUE(CheckAveraged(op, 0.5, SamplePairs(2, s, "test/ball"), 1e-9).pass);
}

TEST(ConvexSetTest, InvalidConstructions) {
  EXPECT_THROW(ConvexSet::Box(V(1, 0), V(0, 1)), InvalidInput);
  EXPECT_THROW(ConvexSet::Ball(V(0, 0), -1.0), InvalidInput);
  EXPECT_THROW(ConvexSet::Halfspace(V(0, 0), 1.0), InvalidInput);
}

}  // namespace
}  // namespace avgnet
