#include "avgnet/network.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace avgnet {
namespace {

NetworkSpec HalfNetwork(double x0) {
  NetworkSpec net;
  net.x0 = Vec::Constant(1, x0);
  net.layers.push_back({Mat::Identity(1, 1), Vec::Zero(1),
                        MakeActivation("linear", {{"lambda", 0.5}})});
  return net;
}

TEST(NetworkSpecTest, ValidateRejectsMismatch) {
  NetworkSpec net = HalfNetwork(1.0);
  net.layers[0].W = Mat::Identity(2, 1);
  EXPECT_THROW(net.Validate(), InvalidInput);
  net = HalfNetwork(1.0);
  net.layers[0].b = Vec::Zero(3);
  EXPECT_THROW(net.Validate(), InvalidInput);
}

TEST(NetworkSpecTest, ForwardComputesLayerOutputs) {
  NetworkSpec net = HalfNetwork(4.0);
  net.layers.push_back(net.layers[0]);
  const auto ys = Forward(net, net.x0);
  ASSERT_EQ(ys.size(), 2u);
  EXPECT_DOUBLE_EQ(ys[0][0], 2.0);
  EXPECT_DOUBLE_EQ(ys[1][0], 1.0);
}

TEST(SpectralNormTest, MatchesSvd) {
  Rng rng = MakeRng(1, "test/spectral");
  const Mat w = StandardNormal(rng, 5, 3);
  EXPECT_NEAR(SpectralNorm(w), Eigen::JacobiSVD<Mat>(w).singularValues()[0], 1e-10);
}

TEST(CertifyNetworkTest, HalfScaling) {
  const auto cert = CertifyNetwork(HalfNetwork(1.0));
  ASSERT_TRUE(cert.certificate.has_value());
  // ||W|| = 1: the affine part is only nonexpansive, so composition gives 1,
  // and promotion needs prod ||W|| < 1.
  EXPECT_EQ(cert.route, "compose");
  EXPECT_EQ(cert.certificate->gamma(), 1.0);
  EXPECT_FALSE(cert.promotion_gamma.has_value());
}

TEST(KmIterateTest, HalvingResiduals) {
  NetworkSpec net = HalfNetwork(8.0);
  net.schedule = RelaxationSchedule::Constant(1.0);
  KmOptions options;
  options.tol = 1e-10;
  const auto trace = KmIterate(net, options);
  ASSERT_TRUE(trace.converged);
  for (std::size_t t = 0; t + 1 < trace.residuals.size(); ++t) {
    EXPECT_DOUBLE_EQ(trace.residuals[t + 1], trace.residuals[t] / 2.0);
  }
  EXPECT_EQ(trace.residuals.size() + 1, trace.iterates.size());
}

TEST(KmIterateTest, RejectsLambdaAboveInverseGamma) {
  const VecMap half = [](const Vec& x) -> Vec { return 0.5 * x; };
  EXPECT_THROW(KmIterate(half, 0.5, Vec::Ones(1), RelaxationSchedule::Constant(2.5)),
               InvalidInput);
}

TEST(KmIterateTest, CustomScheduleOffenderNamed) {
  const VecMap half = [](const Vec& x) -> Vec { return 0.5 * x; };
  auto schedule = RelaxationSchedule::Custom([](std::size_t t) { return t == 3 ? 5.0 : 1.0; });
  try {
    KmIterate(half, 0.5, Vec::Ones(1), schedule);
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("lambda_3 = 5"), std::string::npos) << e.what();
  }
}

TEST(KmIterateTest, NeedsGammaUnlessUnchecked) {
  const VecMap half = [](const Vec& x) -> Vec { return 0.5 * x; };
  EXPECT_THROW(KmIterate(half, std::nullopt, Vec::Ones(1), RelaxationSchedule::Constant(1.0)),
               InvalidInput);
  KmOptions options;
  options.unchecked = true;
  const auto trace =
      KmIterate(half, std::nullopt, Vec::Ones(1), RelaxationSchedule::Constant(1.0), options);
  EXPECT_TRUE(trace.converged);
}

TEST(KmIterateTest, DivergenceReported) {
  const VecMap grow = [](const Vec& x) -> Vec { return 3.0 * x; };
  KmOptions options;
  options.unchecked = true;
  const auto trace =
      KmIterate(grow, std::nullopt, Vec::Ones(1), RelaxationSchedule::Constant(1.0), options);
  EXPECT_FALSE(trace.converged);
  EXPECT_EQ(trace.stop_reason, StopReason::kDiverged);
}

TEST(KmIterateTest, IdentityStopsImmediately) {
  const VecMap id = [](const Vec& x) -> Vec { return x; };
  const auto trace = KmIterate(id, 1.0, Vec::Ones(2), RelaxationSchedule::Constant(1.0));
  EXPECT_TRUE(trace.converged);
  EXPECT_EQ(trace.residuals.size(), 1u);
}

TEST(FejerCheckTest, RandomNetworkIsMonotone) {
  const NetworkSpec net = avgnet::testing::RandomCertifiedNetwork(3, 0);
  const auto trace = KmIterate(net);
  ASSERT_TRUE(trace.converged);
  const Vec x_star = avgnet::testing::PolishFixedPoint(net, trace);
  const auto rep = FejerCheck(trace, x_star, NetworkMap(net), 1e-12);
  EXPECT_TRUE(rep.monotone) << rep.max_increase;
  EXPECT_TRUE(rep.telescoping_holds);
}

TEST(FejerCheckTest, RejectsNonFixedPoint) {
  NetworkSpec net = HalfNetwork(8.0);
  const auto trace = KmIterate(net);
  EXPECT_THROW(FejerCheck(trace, Vec::Ones(1), NetworkMap(net), 1e-12), InvalidInput);
}

TEST(ContractionModeTest, RateBound) {
  NetworkSpec net;
  net.x0 = Vec::Constant(2, 3.0);
  Mat w(2, 2);
  w << 0.3, 0.1, -0.2, 0.4;
  net.layers.push_back({w, Vec::Constant(2, 0.1), MakeActivation("tanh")});
  const auto rep = ContractionMode(net, 1e-12);
  EXPECT_TRUE(rep.trace.converged);
  EXPECT_TRUE(rep.rate_holds) << rep.worst_ratio << " vs " << rep.rate_bound;
}

TEST(ContractionModeTest, RejectsNonContractiveWeights) {
  NetworkSpec net = HalfNetwork(1.0);
  EXPECT_THROW(ContractionMode(net), InvalidInput);
}

TEST(TraceToCsvTest, HeaderAndRows) {
  NetworkSpec net = HalfNetwork(8.0);
  net.schedule = RelaxationSchedule::Constant(1.0);
  KmOptions options;
  options.max_iter = 3;
  options.tol = 0.0;
  const std::string csv = TraceToCsv(KmIterate(net, options));
  EXPECT_EQ(csv.rfind("t,residual\n0,4\n1,2\n", 0), 0u) << csv;
}

}  // namespace
}  // namespace avgnet
