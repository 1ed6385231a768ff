#include "avgnet/federated.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace avgnet {

std::string_view ToString(AggregationKind k) {
  switch (k) {
    case AggregationKind::kParameterMean:
      return "parameter_mean";
    case AggregationKind::kParameterWeighted:
      return "parameter_weighted";
    case AggregationKind::kOperatorWeighted:
      return "operator_weighted";
  }
  return "unknown";
}

AggregationKind ParseAggregationKind(std::string_view s) {
  if (s == "parameter_mean") return AggregationKind::kParameterMean;
  if (s == "parameter_weighted") return AggregationKind::kParameterWeighted;
  if (s == "operator_weighted") return AggregationKind::kOperatorWeighted;
  throw InvalidInput("unknown aggregation rule '" + std::string(s) +
                     "'; valid: parameter_mean, parameter_weighted, "
                     "operator_weighted");
}

namespace {

void CheckWeights(std::span<const double> w, std::size_t n) {
  if (w.size() != n) throw InvalidInput("aggregation needs one weight per contribution");
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw InvalidInput("aggregation weights must be >= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidInput("aggregation weights must sum to 1");
}

double ParamsDistance(const NetworkParams& a, const NetworkParams& b) {
  double s = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    const LayerParams d = a[l] - b[l];
    s += Inner(d, d);
  }
  return std::sqrt(s);
}

}  // namespace

NetworkParams AggregateParams(const AggregationRule& rule,
                              std::span<const NetworkParams> contributions) {
  if (contributions.empty()) throw InvalidInput("no contributions to aggregate");
  if (rule.kind == AggregationKind::kOperatorWeighted) {
    throw InvalidInput("operator_weighted aggregates activation operators, not "
                       "parameters");
  }
  const NetworkParams& first = contributions.front();
  for (const auto& c : contributions) {
    if (c.size() != first.size()) throw InvalidInput("contributions differ in depth");
    for (std::size_t l = 0; l < c.size(); ++l) {
      if (c[l].W.rows() != first[l].W.rows() || c[l].W.cols() != first[l].W.cols() ||
          c[l].b.size() != first[l].b.size()) {
        throw InvalidInput("contributions differ in shape at layer " +
                           std::to_string(l + 1));
      }
    }
  }
  if (rule.kind == AggregationKind::kParameterWeighted) {
    CheckWeights(rule.weights, contributions.size());
  }
  if (contributions.size() == 1) return first;

  NetworkParams out = first;
  const double n = static_cast<double>(contributions.size());
  for (std::size_t l = 0; l < out.size(); ++l) {
    out[l].W.setZero();
    out[l].b.setZero();
    for (std::size_t c = 0; c < contributions.size(); ++c) {
      if (rule.kind == AggregationKind::kParameterMean) {
        out[l].W += contributions[c][l].W;
        out[l].b += contributions[c][l].b;
      } else {
        out[l].W += rule.weights[c] * contributions[c][l].W;
        out[l].b += rule.weights[c] * contributions[c][l].b;
      }
    }
    if (rule.kind == AggregationKind::kParameterMean) {
      out[l].W /= n;
      out[l].b /= n;
    }
  }
  return out;
}

AveragedOperator AggregateOperators(std::span<const AveragedOperator> ops,
                                    std::span<const double> weights) {
  if (ops.empty()) throw InvalidInput("no contributions to aggregate");
  return WeightedSum(std::vector<AveragedOperator>(ops.begin(), ops.end()), weights);
}

Client::Client(std::size_t id, std::vector<Sample> data,
               std::optional<NetworkSpec> teacher)
    : id_(id), data_(std::move(data)), teacher_(std::move(teacher)) {}

TrainingProblem Client::Problem(const NetworkSpec& server_model) const {
  TrainingProblem p;
  p.samples = data_;
  p.net_template = server_model;
  p.teacher = teacher_;
  return p;
}

ClientUpdate Client::LocalTrain(const NetworkSpec& server_model, std::size_t tau,
                                double gamma) const {
  if (tau < 1) throw InvalidInput("tau must be >= 1");
  if (data_.empty()) throw InvalidInput("client " + std::to_string(id_) + " has no data");
  const TrainingProblem problem = Problem(server_model);
  const LayerTargets targets = ResolveLayerTargets(problem);
  TrainState state = InitialState(problem, targets);
  TrainOptions opts;
  opts.gamma = gamma;
  opts.tol = 0.0;
  opts.max_steps = tau;
  TrainFrom(state, problem, targets, opts);
  return {id_, state.theta};
}

ClientReport Client::Report(const NetworkSpec& server_model) const {
  if (data_.empty()) throw InvalidInput("client " + std::to_string(id_) + " has no data");
  const TrainingProblem problem = Problem(server_model);
  const LayerTargets targets = ResolveLayerTargets(problem);
  const NetworkParams params = ParamsOf(server_model);
  const auto inputs = LayerInputs(problem, params);
  ClientReport report;
  report.client_id = id_;
  for (std::size_t l = 0; l < problem.num_layers(); ++l) {
    report.vi_residual.push_back(ViResidual(problem, targets, params, l));
    double worst = 0.0;
    const auto& act = server_model.layers[l].activation;
    for (std::size_t t = 0; t < data_.size(); ++t) {
      const Vec z = params[l].W * inputs[l][t] + params[l].b;
      worst = std::max(worst, (targets.y[l][t] - act.eval(z)).norm());
    }
    report.layer_residual.push_back(worst);
  }
  return report;
}

void FederatedTopology::Validate() const {
  if (servers.empty()) throw InvalidInput("topology has no servers");
  if (tau < 1) throw InvalidInput("tau must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidInput("gamma must be in (0, 1)");
  if (rule.kind == AggregationKind::kOperatorWeighted) {
    throw InvalidInput("run_rounds supports parameter_mean and parameter_weighted; "
                       "operator_weighted has no (W, b) representation");
  }
  if (!(subset_fraction > 0.0 && subset_fraction <= 1.0)) {
    throw InvalidInput("subset_fraction must be in (0, 1]");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InvalidInput("dropout must be in [0, 1)");
  std::map<std::size_t, int> seen;
  for (const auto& c : clients) {
    if (seen[c.id()]++) throw InvalidInput("duplicate client id " + std::to_string(c.id()));
    if (c.num_samples() == 0) {
      throw InvalidInput("client " + std::to_string(c.id()) + " holds no samples");
    }
  }
  for (const auto& s : servers) {
    s.model.Validate();
    if (s.clients.empty()) {
      throw InvalidInput("server " + std::to_string(s.id) + " has no clients");
    }
    for (std::size_t id : s.clients) {
      if (!seen.count(id)) {
        throw InvalidInput("server " + std::to_string(s.id) + " lists unknown client " +
                           std::to_string(id));
      }
    }
    if (rule.kind == AggregationKind::kParameterWeighted &&
        rule.weights.size() != s.clients.size()) {
      throw InvalidInput("parameter_weighted needs one weight per client of server " +
                         std::to_string(s.id));
    }
  }
}

FederatedResult RunRounds(const FederatedTopology& topology, std::size_t rounds) {
  topology.Validate();
  std::map<std::size_t, const Client*> by_id;
  for (const auto& c : topology.clients) by_id[c.id()] = &c;

  FederatedResult result;
  for (const auto& s : topology.servers) result.server_models.push_back(s.model);

  for (std::size_t round = 0; round < rounds; ++round) {
    for (std::size_t si = 0; si < topology.servers.size(); ++si) {
      const ServerConfig& server = topology.servers[si];
      NetworkSpec& model = result.server_models[si];
      Rng rng = MakeRng(topology.seed, "federated/round" + std::to_string(round) +
                                           "/server" + std::to_string(server.id));
      RoundLogEntry entry;
      entry.round = round;
      entry.server = server.id;

      // Eligible clients in listed order, each with its listed weight.
      std::vector<std::size_t> eligible;
      std::vector<double> weights;
      for (std::size_t k = 0; k < server.clients.size(); ++k) {
        eligible.push_back(server.clients[k]);
        if (topology.rule.kind == AggregationKind::kParameterWeighted) {
          weights.push_back(topology.rule.weights[k]);
        }
      }
      std::vector<std::size_t> order(eligible.size());
      std::iota(order.begin(), order.end(), 0);
      if (topology.selection == SelectionPolicy::kRandomSubset) {
        std::shuffle(order.begin(), order.end(), rng);
        const auto keep = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(topology.subset_fraction *
                                                  static_cast<double>(order.size()))));
        order.resize(keep);
        std::sort(order.begin(), order.end());
      }
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<std::size_t> chosen;
      for (std::size_t k : order) {
        const Client& c = *by_id.at(eligible[k]);
        const bool drop = topology.dropout > 0.0 && unit(rng) < topology.dropout;
        if (drop || !c.has_data()) {
          if (!c.has_data()) spdlog::info("client {} has no data; skipped", c.id());
          entry.dropped_clients.push_back(c.id());
          continue;
        }
        chosen.push_back(k);
      }
      if (chosen.empty()) {
        spdlog::warn("round {} server {}: no participating clients", round, server.id);
        result.log.push_back(entry);
        continue;
      }

      std::vector<NetworkParams> contributions;
      AggregationRule rule = topology.rule;
      rule.weights.clear();
      double wsum = 0.0;
      for (std::size_t k : chosen) {
        const Client& c = *by_id.at(eligible[k]);
        ClientUpdate update = c.LocalTrain(model, topology.tau, topology.gamma);
        contributions.push_back(std::move(update.params));
        entry.participating_clients.push_back(c.id());
        if (topology.rule.kind == AggregationKind::kParameterWeighted) {
          rule.weights.push_back(weights[k]);
          wsum += weights[k];
        }
      }
      if (rule.kind == AggregationKind::kParameterWeighted) {
        if (!(wsum > 0.0)) throw InvalidInput("participating clients have zero weight");
        for (double& w : rule.weights) w /= wsum;
      }
      const NetworkParams before = ParamsOf(model);
      const NetworkParams after = AggregateParams(rule, contributions);
      entry.aggregate_norm_delta = ParamsDistance(before, after);
      model = WithParams(model, after);

      for (std::size_t k : chosen) {
        ClientReport rep = by_id.at(eligible[k])->Report(model);
        for (double r : rep.vi_residual) entry.global_residual = std::max(entry.global_residual, r);
        entry.residuals.push_back(std::move(rep));
      }
      result.log.push_back(std::move(entry));
    }
  }
  return result;
}

bool FederatedEquilibrium(const FederatedTopology& topology,
                          const FederatedResult& result, double tol) {
  std::map<std::size_t, const Client*> by_id;
  for (const auto& c : topology.clients) by_id[c.id()] = &c;
  for (std::size_t si = 0; si < topology.servers.size(); ++si) {
    for (std::size_t id : topology.servers[si].clients) {
      const Client& c = *by_id.at(id);
      if (!c.has_data()) continue;
      const ClientReport rep = c.Report(result.server_models[si]);
      for (double r : rep.layer_residual) {
        if (!(r <= tol)) return false;
      }
    }
  }
  return true;
}

}  // namespace avgnet
