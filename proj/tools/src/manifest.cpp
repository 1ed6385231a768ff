#include "avgnet_cli/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <stdexcept>

namespace avgnet::cli {

std::string Sha256Hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

Json RunManifest::ToJson() const {
  Json tol = Json::object();
  for (const auto& [k, v] : tolerances) tol[k] = v;
  Json j{{"command", command},
         {"config_hash", config_hash},
         {"artifact_version", artifact_version}};
  j["seed"] = seed ? Json(*seed) : Json(nullptr);
  j["tolerances"] = std::move(tol);
  j["timestamp"] = timestamp;
  return j;
}

std::int64_t ManifestTimestamp() {
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0') return v;
  }
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace avgnet::cli
