#include "shockcast/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "shockcast/json_io.hpp"

namespace shockcast {

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for hashing: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof(buf));
    std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json inputs_json = nlohmann::json::array();
  for (const auto& [path, hash] : inputs) {
    inputs_json.push_back({{"path", path}, {"fnv1a64", hash}});
  }
  nlohmann::json j{
      {"command", command},   {"version", version},
      {"started_at", started_at}, {"seed", seed},
      {"config", config},     {"inputs", inputs_json},
      {"elapsed_seconds", elapsed_seconds},
  };
  if (!extra.is_null()) j["summary"] = extra;
  return j;
}

void RunManifest::write(const std::string& path) const { write_json_file(path, to_json()); }

}  // namespace shockcast
