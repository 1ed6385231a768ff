#include "avgnet/federated.hpp"

#include "avgnet/serialization.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <type_traits>

namespace avgnet {
namespace {

struct Fixture {
  NetworkSpec teacher = avgnet::testing::TeacherNetwork(31, 2, 2, "sigmoid", 1.0);
  NetworkSpec student = avgnet::testing::ZeroStudent(teacher);

  std::vector<Sample> Shard(int k, std::size_t n = 4) const {
    return avgnet::testing::TeacherSamples(teacher, n, 31, "test/shard" + std::to_string(k));
  }
};

TEST(AggregateTest, MeanAndWeighted) {
  const std::vector<NetworkParams> c = {{{Mat::Constant(1, 1, 2.0), Vec::Constant(1, 2.0)}},
                                        {{Mat::Constant(1, 1, 4.0), Vec::Constant(1, 4.0)}}};
  EXPECT_EQ(AggregateParams({}, c)[0].W(0, 0), 3.0);
  AggregationRule weighted{AggregationKind::kParameterWeighted, {0.25, 0.75}};
  EXPECT_DOUBLE_EQ(AggregateParams(weighted, c)[0].b[0], 3.5);
  AggregationRule bad{AggregationKind::kParameterWeighted, {0.5}};
  EXPECT_THROW(AggregateParams(bad, c), InvalidInput);
}

TEST(AggregateTest, SingleContributionUnchanged) {
  const NetworkParams p = {{Mat::Constant(2, 2, 0.1), Vec::Constant(2, 0.7)}};
  const std::vector<NetworkParams> c = {p};
  const auto out = AggregateParams({}, c);
  EXPECT_EQ(out[0].W, p[0].W);
  EXPECT_EQ(out[0].b, p[0].b);
}

TEST(AggregateTest, OperatorGammaIsWeightedSum) {
  const std::vector<AveragedOperator> ops = {MakeActivation("sigmoid").Operator(),
                                             MakeActivation("relu").Operator()};
  const std::vector<double> w = {0.5, 0.5};
  EXPECT_DOUBLE_EQ(AggregateOperators(ops, w).gamma(), 0.8125);
}

TEST(ParseAggregationKindTest, RoundTrip) {
  for (auto k : {AggregationKind::kParameterMean, AggregationKind::kParameterWeighted,
                 AggregationKind::kOperatorWeighted}) {
    EXPECT_EQ(ParseAggregationKind(ToString(k)), k);
  }
  EXPECT_THROW(ParseAggregationKind("median"), InvalidInput);
}

TEST(RunRoundsTest, SingleClientMatchesTrain) {
  Fixture f;
  FederatedTopology topo;
  topo.clients.emplace_back(0, f.Shard(0), f.teacher);
  topo.servers.push_back({0, f.student, {0}});
  topo.tau = 3;
  const auto fed = RunRounds(topo, 4);

  TrainingProblem p;
  p.samples = f.Shard(0);
  p.net_template = f.student;
  p.teacher = f.teacher;
  TrainOptions options;
  options.tol = 0.0;
  options.max_steps = 12;
  const auto plain = Train(p, options);
  EXPECT_EQ(Dump(ToJson(ParamsOf(fed.server_models[0]))), Dump(ToJson(plain.state.theta)));
}

TEST(RunRoundsTest, EmptyClientRejected) {
  Fixture f;
  FederatedTopology topo;
  topo.clients.emplace_back(0, std::vector<Sample>{}, f.teacher);
  topo.servers.push_back({0, f.student, {0}});
  EXPECT_THROW(RunRounds(topo, 1), InvalidInput);
}

TEST(RunRoundsTest, UnknownClientRejected) {
  Fixture f;
  FederatedTopology topo;
  topo.clients.emplace_back(0, f.Shard(0), f.teacher);
  topo.servers.push_back({0, f.student, {0, 9}});
  EXPECT_THROW(RunRounds(topo, 1), InvalidInput);
}

TEST(RunRoundsTest, OperatorWeightedRejected) {
  Fixture f;
  FederatedTopology topo;
  topo.clients.emplace_back(0, f.Shard(0), f.teacher);
  topo.servers.push_back({0, f.student, {0}});
  topo.rule.kind = AggregationKind::kOperatorWeighted;
  EXPECT_THROW(RunRounds(topo, 1), InvalidInput);
}

TEST(RunRoundsTest, SelectionIsSeeded) {
  Fixture f;
  FederatedTopology topo;
  for (int c = 0; c < 4; ++c) topo.clients.emplace_back(c, f.Shard(c), f.teacher);
  topo.servers.push_back({0, f.student, {0, 1, 2, 3}});
  topo.selection = SelectionPolicy::kRandomSubset;
  topo.subset_fraction = 0.5;
  topo.dropout = 0.2;
  topo.seed = 99;
  const auto a = RunRounds(topo, 5);
  const auto b = RunRounds(topo, 5);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].participating_clients, b.log[i].participating_clients);
    EXPECT_EQ(a.log[i].dropped_clients, b.log[i].dropped_clients);
  }
}

TEST(RunRoundsTest, TwoServersRunIndependently) {
  Fixture f;
  FederatedTopology topo;
  topo.clients.emplace_back(0, f.Shard(0), f.teacher);
  topo.clients.emplace_back(1, f.Shard(1), f.teacher);
  topo.servers.push_back({0, f.student, {0}});
  topo.servers.push_back({1, f.student, {1}});
  const auto both = RunRounds(topo, 3);
  FederatedTopology only_first = topo;
  only_first.servers.pop_back();
  const auto first = RunRounds(only_first, 3);
  EXPECT_EQ(Dump(ToJson(ParamsOf(both.server_models[0]))),
            Dump(ToJson(ParamsOf(first.server_models[0]))));
}

// The server-facing surface of a client exposes no sample accessors.
template <typename C>
concept ExposesData = requires(const C& c) { c.data(); } || requires(const C& c) {
  c.samples();
} || requires(const C& c) { c.data_; };

TEST(PrivacyTest, ClientSurfaceHasNoDataAccessor) {
  static_assert(!ExposesData<Client>);
  static_assert(std::is_same_v<decltype(std::declval<ClientUpdate>().params), NetworkParams>);
  SUCCEED();
}

TEST(PrivacyTest, SentinelNeverReachesServer) {
  Fixture f;
  auto data = f.Shard(0);
  data[0].x[0] = 0.987654321098765;
  data[0].y_L = Forward(f.teacher, data[0].x).back();
  FederatedTopology topo;
  topo.clients.emplace_back(0, data, f.teacher);
  topo.servers.push_back({0, f.student, {0}});
  const auto result = RunRounds(topo, 2);
  std::string seen;
  for (const auto& e : result.log) seen += ToJson(e).dump();
  seen += ToJson(ParamsOf(result.server_models[0])).dump();
  EXPECT_EQ(seen.find("0.98765432109"), std::string::npos);
}

}  // namespace
}  // namespace avgnet
