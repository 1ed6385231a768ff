#include "avgnet_cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace avgnet::cli {

ObjectReader::ObjectReader(const Json& j, std::string path,
                           std::initializer_list<const char*> allowed)
    : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
  for (const auto& [key, value] : j_.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) throw ConfigError(path_ + "/" + key, "unknown field");
  }
}

bool ObjectReader::Has(const char* key) const { return j_.contains(key); }

const Json& ObjectReader::Get(const char* key) const {
  if (!j_.contains(key)) throw ConfigError(PathOf(key), "required field missing");
  return j_.at(key);
}

double ObjectReader::Number(const char* key) const {
  const Json& v = Get(key);
  if (!v.is_number()) throw ConfigError(PathOf(key), "expected a number");
  return v.get<double>();
}

std::optional<double> ObjectReader::OptNumber(const char* key) const {
  if (!Has(key)) return std::nullopt;
  return Number(key);
}

std::size_t ObjectReader::Count(const char* key) const {
  const Json& v = Get(key);
  if (!v.is_number_unsigned()) throw ConfigError(PathOf(key), "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::optional<std::size_t> ObjectReader::OptCount(const char* key) const {
  if (!Has(key)) return std::nullopt;
  return Count(key);
}

std::optional<std::uint64_t> ObjectReader::OptSeed(const char* key) const {
  if (!Has(key)) return std::nullopt;
  const Json& v = Get(key);
  if (!v.is_number_unsigned()) throw ConfigError(PathOf(key), "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string ObjectReader::String(const char* key) const {
  const Json& v = Get(key);
  if (!v.is_string()) throw ConfigError(PathOf(key), "expected a string");
  return v.get<std::string>();
}

std::optional<std::string> ObjectReader::OptString(const char* key) const {
  if (!Has(key)) return std::nullopt;
  return String(key);
}

std::optional<bool> ObjectReader::OptBool(const char* key) const {
  if (!Has(key)) return std::nullopt;
  const Json& v = Get(key);
  if (!v.is_boolean()) throw ConfigError(PathOf(key), "expected true or false");
  return v.get<bool>();
}

Vec ObjectReader::Vector(const char* key) const {
  try {
    return VecFromJson(Get(key), PathOf(key));
  } catch (const InvalidInput& e) {
    throw ConfigError(PathOf(key), e.what());
  }
}

Mat ObjectReader::Matrix(const char* key) const {
  try {
    return MatFromJson(Get(key), PathOf(key));
  } catch (const InvalidInput& e) {
    throw ConfigError(PathOf(key), e.what());
  }
}

Json LoadJsonFile(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("/", "cannot open config file " + file.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("/", std::string("invalid JSON: ") + e.what());
  }
}

ObjectReader TopLevel(const Json& doc, std::initializer_list<const char*> allowed) {
  ObjectReader r(doc, "", allowed);
  const Json& v = r.Get("schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
    throw ConfigError("/schema_version",
                      "unsupported schema version (expected " +
                          std::to_string(kSchemaVersion) + ")");
  }
  return r;
}

ActivationSpec ParseActivation(const Json& j, const std::string& path,
                               const SamplingOptions& sampling) {
  ObjectReader r(j, path, {"kind", "params"});
  const std::string kind = r.String("kind");
  ActivationParams params;
  if (r.Has("params")) {
    const Json& p = r.Get("params");
    if (!p.is_object()) throw ConfigError(r.PathOf("params"), "expected an object");
    for (const auto& [k, v] : p.items()) {
      if (!v.is_number()) throw ConfigError(r.PathOf("params") + "/" + k, "expected a number");
      params[k] = v.get<double>();
    }
  }
  ActivationOptions options;
  options.sampling = sampling;
  try {
    return MakeActivation(kind, params, options);
  } catch (const InvalidInput& e) {
    throw ConfigError(path, e.what());
  }
}

NetworkSpec ParseNetwork(const Json& j, const std::string& path,
                         const SamplingOptions& sampling, bool need_x0) {
  ObjectReader r(j, path, {"x0", "layers", "lambda"});
  NetworkSpec net;
  const Json& layers = r.Get("layers");
  if (!layers.is_array() || layers.empty()) {
    throw ConfigError(r.PathOf("layers"), "expected a non-empty array");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string lp = r.PathOf("layers") + "/" + std::to_string(l);
    ObjectReader lr(layers[l], lp, {"W", "b", "activation"});
    LayerSpec layer;
    layer.W = lr.Matrix("W");
    layer.b = lr.Vector("b");
    layer.activation = ParseActivation(lr.Get("activation"), lr.PathOf("activation"), sampling);
    net.layers.push_back(std::move(layer));
  }
  if (need_x0 || r.Has("x0")) {
    net.x0 = r.Vector("x0");
  } else {
    net.x0 = Vec::Zero(net.layers.front().W.cols());
  }
  if (auto lambda = r.OptNumber("lambda")) {
    net.schedule = RelaxationSchedule::Constant(*lambda);
  }
  try {
    net.Validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(path, e.what());
  }
  return net;
}

std::vector<Sample> ParseSamples(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array");
  std::vector<Sample> out;
  for (std::size_t t = 0; t < j.size(); ++t) {
    ObjectReader r(j[t], path + "/" + std::to_string(t), {"x", "y_L", "y_layers"});
    Sample s;
    s.x = r.Vector("x");
    s.y_L = r.Vector("y_L");
    if (r.Has("y_layers")) {
      const Json& ys = r.Get("y_layers");
      if (!ys.is_array()) throw ConfigError(r.PathOf("y_layers"), "expected an array");
      std::vector<Vec> layers;
      for (std::size_t l = 0; l < ys.size(); ++l) {
        const std::string yp = r.PathOf("y_layers") + "/" + std::to_string(l);
        try {
          layers.push_back(VecFromJson(ys[l], yp));
        } catch (const InvalidInput& e) {
          throw ConfigError(yp, e.what());
        }
      }
      s.y_layers = std::move(layers);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<DecoderBlock> ParseBlocks(const Json& j, const std::string& path,
                                      const SamplingOptions& sampling) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array");
  std::vector<DecoderBlock> blocks;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string bp = path + "/" + std::to_string(k);
    ObjectReader r(j[k], bp, {"heads", "ff", "rho", "zeta", "eps", "softmax"});
    DecoderBlock block;
    const Json& heads = r.Get("heads");
    if (!heads.is_array()) throw ConfigError(r.PathOf("heads"), "expected an array");
    for (std::size_t h = 0; h < heads.size(); ++h) {
      ObjectReader hr(heads[h], r.PathOf("heads") + "/" + std::to_string(h),
                      {"w_qk", "w_ov"});
      block.heads.push_back({hr.Matrix("w_qk"), hr.Matrix("w_ov")});
    }
    ObjectReader fr(r.Get("ff"), r.PathOf("ff"), {"W", "b", "activation"});
    block.ff.W = fr.Matrix("W");
    block.ff.b = fr.Vector("b");
    block.ff.activation =
        ParseActivation(fr.Get("activation"), fr.PathOf("activation"), sampling);
    block.rho = r.Vector("rho");
    block.zeta = r.Vector("zeta");
    if (auto eps = r.OptNumber("eps")) block.eps = *eps;
    if (auto mode = r.OptString("softmax")) {
      try {
        block.mode = ParseSoftmaxMode(*mode);
      } catch (const InvalidInput& e) {
        throw ConfigError(r.PathOf("softmax"), e.what());
      }
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

GsFamily ParseFamily(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array");
  GsFamily family;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string mp = path + "/" + std::to_string(k);
    try {
      family.push_back({MatFromJson(j[k], mp)});
    } catch (const InvalidInput& e) {
      throw ConfigError(mp, e.what());
    }
  }
  return family;
}

GsFamily ReadFamilyCsv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("/family_csv", "cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("/family_csv", "empty CSV file");
  const auto members = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<std::vector<double>> cols(members);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    ss.imbue(std::locale::classic());
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= members) throw ConfigError("/family_csv", "row " + std::to_string(row) + " has too many cells");
      std::istringstream cs(cell);
      cs.imbue(std::locale::classic());
      double v = 0.0;
      if (!(cs >> v)) throw ConfigError("/family_csv", "row " + std::to_string(row) + ": not a number");
      cols[c++].push_back(v);
    }
    if (c != members) throw ConfigError("/family_csv", "row " + std::to_string(row) + " has too few cells");
  }
  GsFamily family;
  for (const auto& col : cols) {
    Mat m(static_cast<Index>(col.size()), 1);
    for (std::size_t i = 0; i < col.size(); ++i) m(static_cast<Index>(i), 0) = col[i];
    family.push_back({m});
  }
  return family;
}

}  // namespace avgnet::cli
