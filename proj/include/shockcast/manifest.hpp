#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace shockcast {

inline constexpr const char* kVersion = "0.1.0";

// FNV-1a (64 bit) of a file's bytes, hex encoded.
std::string hash_file(const std::string& path);

// Reproducibility record written next to every command's outputs.
struct RunManifest {
  std::string command;
  std::string version = kVersion;
  std::string started_at;  // UTC, RFC 3339
  std::uint64_t seed = 0;
  nlohmann::json config;  // merged module configs as run
  std::vector<std::pair<std::string, std::string>> inputs;  // path, hash
  double elapsed_seconds = 0.0;
  nlohmann::json extra;  // e.g. convergence summary

  void add_input(const std::string& path) { inputs.push_back({path, hash_file(path)}); }
  nlohmann::json to_json() const;
  void write(const std::string& path) const;
};

std::string utc_timestamp();

}  // namespace shockcast
