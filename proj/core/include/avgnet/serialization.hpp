#pragma once

#include "avgnet/equilibrium.hpp"
#include "avgnet/federated.hpp"
#include "avgnet/gram_schmidt.hpp"
#include "avgnet/llm.hpp"
#include "avgnet/network.hpp"
#include "avgnet/trainer.hpp"

#include "json.hpp"

#include <string>

namespace avgnet {

using Json = nlohmann::ordered_json;

Json ToJson(const Vec& v);
Json ToJson(const Mat& m);  // array of rows
Json ToJson(const GammaCertificate& c);
Json ToJson(const AveragednessReport& r);
Json ToJson(const ActivationSpec& a);
Json ToJson(const NetworkCertificate& c);
// Iterates are written only when there are at most `max_iterates` of them.
Json ToJson(const IterationTrace& t, std::size_t max_iterates = 1000);
Json ToJson(const FejerReport& r);
Json ToJson(const ContractionReport& r);
Json ToJson(const NashReport& r);
Json ToJson(const PocsReport& r);
Json ToJson(const TrainReport& r);
Json ToJson(const LayerParams& p);
Json ToJson(const NetworkParams& p);
Json ToJson(const ClientReport& r);
Json ToJson(const RoundLogEntry& e);
Json ToJson(const GsRun& r);
Json ToJson(const IdempotenceReport& r);
Json ToJson(const LinearPredictor& p);
Json ToJson(const DecoderFixpointResult& r);

// Readers throw InvalidInput naming `path` (a JSON pointer) on bad shape.
Vec VecFromJson(const Json& j, const std::string& path);
Mat MatFromJson(const Json& j, const std::string& path);

// Two-space indented dump with a trailing newline.
std::string Dump(const Json& j);

}  // namespace avgnet
