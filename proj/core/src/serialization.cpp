#include "avgnet/serialization.hpp"

namespace avgnet {

Json ToJson(const Vec& v) {
  Json j = Json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Json ToJson(const Mat& m) {
  Json j = Json::array();
  for (Index r = 0; r < m.rows(); ++r) j.push_back(ToJson(Vec(m.row(r).transpose())));
  return j;
}

Json ToJson(const GammaCertificate& c) {
  Json j{{"gamma", c.gamma()}, {"provenance", ToString(c.provenance())}};
  if (c.estimate()) {
    j["estimate"] = {{"samples", c.estimate()->samples},
                     {"max_violation", c.estimate()->max_violation},
                     {"lipschitz", c.estimate()->lipschitz},
                     {"seed", c.estimate()->seed}};
  }
  return j;
}

Json ToJson(const AveragednessReport& r) {
  Json j{{"label", r.label},
         {"gamma", r.gamma},
         {"provenance", ToString(r.provenance)},
         {"samples", r.samples},
         {"worst_violation", r.worst_violation},
         {"pass", r.pass}};
  if (r.witness) {
    j["witness"] = {{"x", ToJson(r.witness->x)},
                    {"y", ToJson(r.witness->y)},
                    {"violation", r.witness->violation}};
  }
  return j;
}

Json ToJson(const ActivationSpec& a) {
  Json params = Json::object();
  for (const auto& [k, v] : a.params) params[k] = v;
  Json j{{"kind", a.kind}, {"params", params}};
  j["claimed_gamma"] = a.claimed_gamma ? Json(*a.claimed_gamma) : Json(nullptr);
  j["certificate"] = a.certificate ? ToJson(*a.certificate) : Json(nullptr);
  j["lipschitz_estimate"] =
      a.lipschitz_estimate ? Json(*a.lipschitz_estimate) : Json(nullptr);
  if (!a.note.empty()) j["note"] = a.note;
  return j;
}

Json ToJson(const NetworkCertificate& c) {
  Json j{{"route", c.route}};
  j["certificate"] = c.certificate ? ToJson(*c.certificate) : Json(nullptr);
  j["compose_gamma"] = c.compose_gamma ? Json(*c.compose_gamma) : Json(nullptr);
  j["promotion_gamma"] = c.promotion_gamma ? Json(*c.promotion_gamma) : Json(nullptr);
  j["weight_norms"] = c.weight_norms;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json ToJson(const IterationTrace& t, std::size_t max_iterates) {
  Json j{{"converged", t.converged},
         {"stop_reason", ToString(t.stop_reason)},
         {"iterations", t.residuals.size()}};
  j["gamma"] = t.gamma ? Json(*t.gamma) : Json(nullptr);
  j["residuals"] = t.residuals;
  j["lambdas"] = t.lambdas;
  j["final_iterate"] = ToJson(t.final_iterate());
  if (t.iterates.size() <= max_iterates) {
    Json it = Json::array();
    for (const auto& x : t.iterates) it.push_back(ToJson(x));
    j["iterates"] = std::move(it);
  }
  Json layers = Json::array();
  for (const auto& y : t.layer_outputs) layers.push_back(ToJson(y));
  j["layer_outputs"] = std::move(layers);
  j["warnings"] = t.warnings;
  return j;
}

Json ToJson(const FejerReport& r) {
  return {{"distances", r.distances},
          {"max_increase", r.max_increase},
          {"monotone", r.monotone},
          {"telescoping_sum", r.telescoping_sum},
          {"bound", r.bound},
          {"telescoping_holds", r.telescoping_holds}};
}

Json ToJson(const ContractionReport& r) {
  return {{"trace", ToJson(r.trace)},
          {"weight_norms", r.weight_norms},
          {"rate_bound", r.rate_bound},
          {"ratios", r.ratios},
          {"worst_ratio", r.worst_ratio},
          {"rate_holds", r.rate_holds}};
}

Json ToJson(const NashReport& r) {
  Json layers = Json::array();
  for (const auto& l : r.layers) {
    Json e{{"residual", l.residual}, {"prox_form_skipped", l.prox_form_skipped}};
    e["prox_gap"] = l.prox_gap ? Json(*l.prox_gap) : Json(nullptr);
    if (l.deviation) {
      e["deviation"] = {{"samples", l.deviation->samples},
                        {"best_improvement", l.deviation->best_improvement}};
    }
    layers.push_back(std::move(e));
  }
  return {{"layers", layers},
          {"per_layer_residual", r.per_layer_residual},
          {"deviation_samples", r.deviation_samples},
          {"best_improvement", r.best_improvement},
          {"is_equilibrium", r.is_equilibrium}};
}

Json ToJson(const PocsReport& r) {
  return {{"trace", ToJson(r.trace)},
          {"limit", ToJson(r.limit)},
          {"violations", r.violations},
          {"all_members", r.all_members},
          {"pairwise_projection_gap", r.pairwise_projection_gap},
          {"players_distinct", r.players_distinct}};
}

Json ToJson(const TrainReport& r) {
  return {{"target_source", ToString(r.target_source)},
          {"sweeps", r.sweeps},
          {"converged", r.converged},
          {"final_vi_residual", r.final_vi_residual},
          {"fit_error", r.fit_error},
          {"output_error", r.output_error},
          {"exact_fit", r.exact_fit},
          {"residual_curves", r.residual_curves}};
}

Json ToJson(const LayerParams& p) { return {{"W", ToJson(p.W)}, {"b", ToJson(p.b)}}; }

Json ToJson(const NetworkParams& p) {
  Json j = Json::array();
  for (const auto& l : p) j.push_back(ToJson(l));
  return j;
}

Json ToJson(const ClientReport& r) {
  return {{"client", r.client_id},
          {"vi_residual", r.vi_residual},
          {"layer_residual", r.layer_residual}};
}

Json ToJson(const RoundLogEntry& e) {
  Json reports = Json::array();
  for (const auto& r : e.residuals) reports.push_back(ToJson(r));
  return {{"round", e.round},
          {"server", e.server},
          {"participating_clients", e.participating_clients},
          {"dropped_clients", e.dropped_clients},
          {"residuals", reports},
          {"global_residual", e.global_residual},
          {"aggregate_norm_delta", e.aggregate_norm_delta}};
}

Json ToJson(const GsRun& r) {
  Json members = Json::array();
  for (const auto& m : r.orthonormal) members.push_back(ToJson(m.samples));
  return {{"orthonormal", members}, {"r", ToJson(r.r)}, {"gram", ToJson(r.gram)}};
}

Json ToJson(const IdempotenceReport& r) {
  return {{"max_entry_change", r.max_entry_change}, {"idempotent", r.idempotent}};
}

Json ToJson(const LinearPredictor& p) {
  return {{"intercept", ToJson(p.intercept)}, {"B", ToJson(p.B)}};
}

Json ToJson(const DecoderFixpointResult& r) {
  Json blocks = Json::array();
  for (const auto& b : r.blocks) {
    blocks.push_back({{"certifiable", b.certifiable},
                      {"gamma", b.certifiable ? Json(b.gamma) : Json(nullptr)},
                      {"lipschitz", b.lipschitz}});
  }
  Json j{{"blocks", blocks}};
  j["gamma"] = r.gamma ? Json(*r.gamma) : Json(nullptr);
  j["unchecked"] = r.unchecked;
  j["trace"] = ToJson(r.trace);
  j["fixed_point"] = ToJson(r.fixed_point);
  j["block_residuals"] = r.block_residuals;
  j["equilibrium"] = r.equilibrium;
  if (r.jacobian) {
    j["jacobian"] = {{"points", r.jacobian->points},
                     {"max_jacobian_change_ratio", r.jacobian->max_jacobian_change_ratio}};
  }
  j["warnings"] = r.warnings;
  return j;
}

Vec VecFromJson(const Json& j, const std::string& path) {
  if (!j.is_array()) throw InvalidInput(path + ": expected an array of numbers");
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw InvalidInput(path + "/" + std::to_string(i) + ": expected a number");
    }
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

Mat MatFromJson(const Json& j, const std::string& path) {
  if (!j.is_array()) throw InvalidInput(path + ": expected an array of rows");
  if (j.empty()) return Mat(0, 0);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Mat m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string row_path = path + "/" + std::to_string(r);
    const Vec row = VecFromJson(j[r], row_path);
    if (static_cast<std::size_t>(row.size()) != cols) {
      throw InvalidInput(row_path + ": ragged matrix row");
    }
    m.row(static_cast<Index>(r)) = row.transpose();
  }
  return m;
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace avgnet
