#include "avgnet/trainer.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

namespace avgnet {
namespace {

TrainingProblem TeacherProblem(const std::string& kind, std::size_t samples) {
  const NetworkSpec teacher = avgnet::testing::TeacherNetwork(21, 2, 2, kind, 1.0);
  TrainingProblem p;
  p.samples = avgnet::testing::TeacherSamples(teacher, samples, 21, "test/trainer");
  p.net_template = avgnet::testing::ZeroStudent(teacher);
  p.teacher = teacher;
  return p;
}

TEST(AffineLiftTest, NormAndAdjoint) {
  Vec x(2);
  x << 3.0, 4.0;
  const AffineLift lift(x);
  EXPECT_DOUBLE_EQ(lift.Norm(), std::sqrt(26.0));
  const LayerParams theta{Mat::Identity(2, 2), Vec::Ones(2)};
  const Vec z = Vec::Constant(2, 0.5);
  EXPECT_NEAR(lift.Apply(theta).dot(z), Inner(theta, lift.Adjoint(z)), 1e-14);
}

TEST(ResolveTargetsTest, FinalOnlyNeedsTeacher) {
  TrainingProblem p = TeacherProblem("sigmoid", 3);
  p.net_template.layers.push_back(p.net_template.layers.back());
  p.teacher.reset();
  p.net_template.layers.pop_back();
  EXPECT_THROW(ResolveLayerTargets(p), InvalidInput);
}

TEST(ResolveTargetsTest, GivenTargetsUsed) {
  TrainingProblem p = TeacherProblem("sigmoid", 3);
  for (auto& s : p.samples) s.y_layers = Forward(*p.teacher, s.x);
  p.teacher.reset();
  EXPECT_EQ(ResolveLayerTargets(p).source, TargetSource::kGiven);
}

TEST(GdStepTest, ObjectiveDecreases) {
  const TrainingProblem p = TeacherProblem("sigmoid", 5);
  const LayerTargets targets = ResolveLayerTargets(p);
  TrainState state = InitialState(p, targets);
  for (int i = 0; i < 50; ++i) {
    for (std::size_t l = 0; l < p.num_layers(); ++l) GdStep(state, p, targets, l, 0.5);
  }
  EXPECT_LT(state.objective.back(), state.objective.front());
  EXPECT_EQ(state.objective.size(), state.step + 1);
}

TEST(GdStepTest, GammaRangeEnforced) {
  const TrainingProblem p = TeacherProblem("sigmoid", 2);
  const LayerTargets targets = ResolveLayerTargets(p);
  TrainState state = InitialState(p, targets);
  EXPECT_THROW(GdStep(state, p, targets, 0, 1.0), InvalidInput);
  EXPECT_THROW(GdStep(state, p, targets, 0, 0.0), InvalidInput);
}

TEST(TrainTest, TeacherStudentExactFit) {
  const TrainingProblem p = TeacherProblem("sigmoid", 8);
  TrainOptions options;
  options.gamma = 0.9;
  options.tol = 1e-7;
  const auto result = Train(p, options);
  EXPECT_TRUE(result.report.converged);
  EXPECT_LE(result.report.output_error, 1e-5);
}

TEST(TrainTest, PerSampleModeFitsEachSample) {
  const TrainingProblem p = TeacherProblem("softsign", 3);
  TrainOptions options;
  options.mode = ThetaMode::kPerSample;
  options.gamma = 0.9;
  options.tol = 1e-9;
  const auto result = Train(p, options);
  EXPECT_TRUE(result.report.converged);
  EXPECT_EQ(result.state.per_sample.size(), 3u);
}

TEST(DualObjectiveTest, GradientIsViOperator) {
  const TrainingProblem p = TeacherProblem("softsign", 4);
  const LayerTargets targets = ResolveLayerTargets(p);
  NetworkParams params = ParamsOf(*p.teacher);
  params[1].W *= 0.7;
  const LayerParams analytic = ViOperator(p, targets, params, 1);
  const LayerParams fd = DualObjectiveFdGradient(p, targets, params, 1);
  EXPECT_LE(Norm(analytic - fd), 1e-5);
}

TEST(DualObjectiveTest, UnsupportedActivation) {
  const TrainingProblem p = TeacherProblem("tanh", 2);
  const LayerTargets targets = ResolveLayerTargets(p);
  EXPECT_THROW(DualObjective(p, targets, ParamsOf(p.net_template), 0), InvalidInput);
}

TEST(ViDirectionalTest, HoldsAtSolution) {
  const TrainingProblem p = TeacherProblem("sigmoid", 4);
  const LayerTargets targets = ResolveLayerTargets(p);
  const auto rep = ViDirectionalCheck(p, targets, ParamsOf(*p.teacher), 0, 100, 1, 1e-12);
  EXPECT_TRUE(rep.pass);
}

}  // namespace
}  // namespace avgnet
