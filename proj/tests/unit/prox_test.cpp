#include "avgnet/prox.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace avgnet {
namespace {

double Sigma(double x) { return 1.0 / (1.0 + std::exp(-x)); }

TEST(ProxTest, ZeroPotentialIsIdentity) {
  for (double x : {-3.0, 0.0, 2.5}) EXPECT_NEAR(ProxEval(ZeroPotential(), x), x, 1e-7);
}

TEST(ProxTest, CenteredPotentialGivesShiftedSigmoid) {
  const auto f = CenteredSigmoidPotential();
  for (double x : {-6.0, -1.0, 0.0, 0.3, 4.0}) {
    EXPECT_NEAR(ProxEval(f, x), Sigma(x) - 0.5, 1e-6) << x;
  }
}

TEST(ProxTest, SigmoidPotential) {
  const auto f = SigmoidPotential();
  for (double x : {-10.0, -1.0, 0.0, 2.0, 15.0}) EXPECT_NEAR(ProxEval(f, x), Sigma(x), 1e-6);
}

TEST(ProxTest, SoftsignPotential) {
  const auto f = SoftsignPotential();
  for (double x : {-10.0, -0.2, 0.0, 1.0, 30.0}) {
    EXPECT_NEAR(ProxEval(f, x), x / (1.0 + std::abs(x)), 1e-6);
  }
}

TEST(ProxTest, PotentialsAreConvex) {
  EXPECT_LE(MidpointConvexityViolation(SigmoidPotential(), 2000, 1), 1e-12);
  EXPECT_LE(MidpointConvexityViolation(SoftsignPotential(), 2000, 2), 1e-12);
}

TEST(ProxTest, OutsideDomainIsInfinite) {
  const auto f = SoftsignPotential();
  EXPECT_TRUE(std::isinf(f(1.0)));
  EXPECT_TRUE(std::isinf(f(-2.0)));
  EXPECT_TRUE(std::isfinite(f(0.5)));
}

TEST(ProxTest, FixedPointsAreMinimizers) {
  const auto f = SoftsignPotential();
  const double m = PotentialMinimizer(f);
  EXPECT_NEAR(ProxEval(f, m), m, 1e-6);
}

TEST(ProxTest, PotentialForKnownRows) {
  EXPECT_TRUE(PotentialFor("sigmoid").has_value());
  EXPECT_TRUE(PotentialFor("softsign").has_value());
  EXPECT_TRUE(PotentialFor("identity").has_value());
  EXPECT_FALSE(PotentialFor("relu").has_value());
}

TEST(ConjugateTest, DerivativeIsActivation) {
  const std::vector<double> xs{-4.0, -1.0, 0.0, 0.5, 3.0};
  for (const char* kind : {"sigmoid", "softsign"}) {
    const auto rep = ConjugateGradIdentityCheck(kind, xs, 1e-5);
    EXPECT_TRUE(rep.pass) << kind << " error " << rep.max_error;
  }
}

TEST(ConjugateTest, UnsupportedKindRejected) {
  EXPECT_THROW(ConjugateGradIdentityCheck("relu", {0.0}, 1e-5), InvalidInput);
}

}  // namespace
}  // namespace avgnet
