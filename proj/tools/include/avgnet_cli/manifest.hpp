#pragma once

#include <avgnet/serialization.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace avgnet::cli {

// Hex SHA-256 of `bytes`.
std::string Sha256Hex(const std::string& bytes);

struct RunManifest {
  std::string command;
  std::string config_hash;  // SHA-256 of the config bytes and effective flags
  std::string artifact_version;
  std::optional<std::uint64_t> seed;
  std::map<std::string, double> tolerances;
  // Seconds since the epoch; SOURCE_DATE_EPOCH when set, else the wall clock.
  std::int64_t timestamp = 0;

  Json ToJson() const;
};

std::int64_t ManifestTimestamp();

}  // namespace avgnet::cli
