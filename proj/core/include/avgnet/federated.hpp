#pragma once

#include "avgnet/trainer.hpp"

#include <span>
#include <string>
#include <vector>

namespace avgnet {

enum class AggregationKind { kParameterMean, kParameterWeighted, kOperatorWeighted };

std::string_view ToString(AggregationKind k);
AggregationKind ParseAggregationKind(std::string_view s);

struct AggregationRule {
  AggregationKind kind = AggregationKind::kParameterMean;
  std::vector<double> weights;  // kParameterWeighted / kOperatorWeighted
};

// Entrywise mean (or weighted mean) of the contributions. A single
// contribution is returned unchanged.
NetworkParams AggregateParams(const AggregationRule& rule,
                              std::span<const NetworkParams> contributions);

// Convex combination of activation operators; gamma = sum w_c gamma_c.
AveragedOperator AggregateOperators(std::span<const AveragedOperator> ops,
                                    std::span<const double> weights);

// What a client sends back: parameters only.
struct ClientUpdate {
  std::size_t client_id = 0;
  NetworkParams params;
};

// Scalar diagnostics a client computes on its own data.
struct ClientReport {
  std::size_t client_id = 0;
  std::vector<double> vi_residual;    // per layer
  std::vector<double> layer_residual;  // per layer, max_t |y_l - r_l(A theta_l)|
};

/// A data holder. Its samples never leave the object: the public surface
/// takes a server model and returns parameters or scalar reports.
class Client {
 public:
  Client(std::size_t id, std::vector<Sample> data,
         std::optional<NetworkSpec> teacher = std::nullopt);

  std::size_t id() const { return id_; }
  bool has_data() const { return !data_.empty(); }
  std::size_t num_samples() const { return data_.size(); }

  // tau sweeps of the layer-wise gradient step starting from the server
  // model's parameters.
  ClientUpdate LocalTrain(const NetworkSpec& server_model, std::size_t tau,
                          double gamma) const;
  ClientReport Report(const NetworkSpec& server_model) const;

 private:
  TrainingProblem Problem(const NetworkSpec& server_model) const;

  std::size_t id_;
  std::vector<Sample> data_;
  std::optional<NetworkSpec> teacher_;
};

struct ServerConfig {
  std::size_t id = 0;
  NetworkSpec model;
  std::vector<std::size_t> clients;  // client ids
};

enum class SelectionPolicy { kAll, kRandomSubset };

struct FederatedTopology {
  std::vector<ServerConfig> servers;
  std::vector<Client> clients;
  std::size_t tau = 1;
  double gamma = 0.5;
  AggregationRule rule;
  SelectionPolicy selection = SelectionPolicy::kAll;
  double subset_fraction = 1.0;  // kRandomSubset: share of eligible clients
  double dropout = 0.0;          // per-client drop probability per round
  std::uint64_t seed = kDefaultSeed;

  void Validate() const;
};

struct RoundLogEntry {
  std::size_t round = 0;
  std::size_t server = 0;
  std::vector<std::size_t> participating_clients;
  std::vector<std::size_t> dropped_clients;
  std::vector<ClientReport> residuals;  // participants, on the new model
  double global_residual = 0.0;         // max VI residual over participants
  double aggregate_norm_delta = 0.0;    // |theta_new - theta_old|
};

struct FederatedResult {
  std::vector<RoundLogEntry> log;
  std::vector<NetworkSpec> server_models;  // same order as topology.servers
};

/// Broadcast -> local train -> collect -> aggregate, per server per round.
/// Servers run independently; the operator_weighted rule is rejected here
/// (clients train parameters, not activations).
FederatedResult RunRounds(const FederatedTopology& topology, std::size_t rounds);

// True when every client's reported per-layer fixed-point residual on the
// final server model is <= tol (the server model is a common equilibrium of
// the clients' layer games).
bool FederatedEquilibrium(const FederatedTopology& topology,
                          const FederatedResult& result, double tol);

}  // namespace avgnet
