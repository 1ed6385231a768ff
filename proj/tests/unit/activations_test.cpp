#include "avgnet/activations.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

namespace avgnet {
namespace {

TEST(CatalogTest, NamesAreUnique) {
  const auto names = CatalogNames();
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), names.size());
  EXPECT_GE(names.size(), 40u);
}

TEST(CatalogTest, UnknownNameListsValidNames) {
  try {
    MakeActivation("no_such_activation");
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("sigmoid"), std::string::npos);
  }
}

TEST(CatalogTest, UnknownParameterRejected) {
  EXPECT_THROW(MakeActivation("sigmoid", {{"lambda", 1.0}}), InvalidInput);
}

TEST(ActivationTest, SigmoidCertifiedAtFiveEighths) {
  const auto spec = MakeActivation("sigmoid");
  ASSERT_TRUE(spec.certified());
  EXPECT_DOUBLE_EQ(spec.certificate->gamma(), 0.625);
  EXPECT_EQ(spec.certificate->provenance(), Provenance::kClosedForm);
  EXPECT_NEAR(EvalScalar(spec, 0.0), 0.5, 1e-15);
}

TEST(ActivationTest, LinearGammaFollowsLambda) {
  const auto spec = MakeActivation("linear", {{"lambda", 0.5}});
  EXPECT_DOUBLE_EQ(*spec.claimed_gamma, 0.75);
  EXPECT_DOUBLE_EQ(EvalScalar(spec, 4.0), 2.0);
}

TEST(ActivationTest, OutOfRegimeFallsBackToEstimate) {
  // lambda = 2 makes linear expansive: no closed form and no certificate.
  const auto spec = MakeActivation("linear", {{"lambda", 2.0}});
  EXPECT_FALSE(spec.claimed_gamma.has_value());
  EXPECT_FALSE(spec.certified());
  EXPECT_FALSE(spec.note.empty());
  EXPECT_THROW(spec.Operator(), NumericalError);
}

TEST(ActivationTest, RefutedClaimIsDowngraded) {
  // SiLU has Lipschitz constant ~1.1, so the claimed gamma = 1 cannot hold.
  const auto spec = MakeActivation("silu");
  ASSERT_TRUE(spec.claimed_gamma.has_value());
  EXPECT_FALSE(spec.certified() &&
               spec.certificate->provenance() == Provenance::kClosedForm);
  EXPECT_NE(spec.note.find("fails the sampled check"), std::string::npos);
}

TEST(ActivationTest, BipolarSigmoidIsHalfTanh) {
  const auto spec = MakeActivation("bipolar_sigmoid");
  for (double x : {-3.0, -0.5, 0.0, 0.7, 5.0}) {
    EXPECT_NEAR(EvalScalar(spec, x), std::tanh(x / 2.0), 1e-14);
  }
  EXPECT_EQ(spec.certificate->provenance(), Provenance::kDerivedFormula);
}

TEST(ActivationTest, SoftmaxOutputsDistribution) {
  const auto spec = MakeActivation("softmax", {{"lambda", 1.0}});
  Vec x(3);
  x << 1.0, 2.0, 3.0;
  const Vec y = spec(x);
  EXPECT_NEAR(y.sum(), 1.0, 1e-15);
  EXPECT_TRUE((y.array() > 0.0).all());
}

TEST(ActivationTest, ReduceRowsAreOneDimensional) {
  const auto spec = MakeActivation("maxout");
  EXPECT_EQ(spec.arity, Arity::kReduce);
  EXPECT_EQ(spec.dim(), 1);
}

TEST(ActivationTest, AttentionCompositeUsesInnerOperator) {
  const auto spec = MakeActivation("attention_softmax");
  ASSERT_TRUE(spec.certified());
  // softmax(lambda = 1/2) is 3/4-averaged, the default inner linear(1/2) too.
  const double s = 0.75 / 0.25 + 0.75 / 0.25;
  EXPECT_NEAR(spec.certificate->gamma(), s / (1.0 + s), 1e-15);
}

TEST(ActivationTest, SoftExponentialNegativeLambdaRejected) {
  EXPECT_THROW(MakeActivation("soft_exponential", {{"lambda", -0.5}}), InvalidInput);
}

TEST(ActivationTest, CertifiedRowsAreNonexpansiveOnSample) {
  ActivationOptions options;
  options.sampling.pairs = 500;
  for (const auto& name : CatalogNames()) {
    const auto spec = MakeActivation(name, {}, options);
    if (!spec.certified()) continue;
    const Index dim = spec.arity == Arity::kVector ? options.vector_dim : 1;
    const auto pairs = SamplePairs(dim, options.sampling, "test/nonexpansive/" + name);
    EXPECT_TRUE(CheckAveraged(spec.eval, 1.0, pairs, 1e-9).pass) << name;
  }
}

}  // namespace
}  // namespace avgnet
