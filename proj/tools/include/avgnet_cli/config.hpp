#pragma once

#include <avgnet/federated.hpp>
#include <avgnet/gram_schmidt.hpp>
#include <avgnet/llm.hpp>
#include <avgnet/serialization.hpp>
#include <avgnet/trainer.hpp>

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>

namespace avgnet::cli {

inline constexpr int kSchemaVersion = 1;

// Schema violation; the message starts with the JSON pointer of the field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Strict view of a JSON object: construction fails on any key outside
/// `allowed`.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path, std::initializer_list<const char*> allowed);

  bool Has(const char* key) const;
  const Json& Get(const char* key) const;  // required
  std::string PathOf(const char* key) const { return path_ + "/" + key; }
  const std::string& path() const { return path_; }

  double Number(const char* key) const;
  std::optional<double> OptNumber(const char* key) const;
  std::size_t Count(const char* key) const;
  std::optional<std::size_t> OptCount(const char* key) const;
  std::optional<std::uint64_t> OptSeed(const char* key) const;
  std::string String(const char* key) const;
  std::optional<std::string> OptString(const char* key) const;
  std::optional<bool> OptBool(const char* key) const;
  Vec Vector(const char* key) const;
  Mat Matrix(const char* key) const;

 private:
  const Json& j_;
  std::string path_;
};

Json LoadJsonFile(const std::filesystem::path& file);

// Checks "schema_version" and the top-level key set.
ObjectReader TopLevel(const Json& doc, std::initializer_list<const char*> allowed);

ActivationSpec ParseActivation(const Json& j, const std::string& path,
                               const SamplingOptions& sampling);
// Network layers; x0 is required only when `need_x0` (otherwise zeros).
NetworkSpec ParseNetwork(const Json& j, const std::string& path,
                         const SamplingOptions& sampling, bool need_x0);
std::vector<Sample> ParseSamples(const Json& j, const std::string& path);
std::vector<DecoderBlock> ParseBlocks(const Json& j, const std::string& path,
                                      const SamplingOptions& sampling);
GsFamily ParseFamily(const Json& j, const std::string& path);
// One column per member (d = 1), header row of member names.
GsFamily ReadFamilyCsv(const std::filesystem::path& file);

}  // namespace avgnet::cli
