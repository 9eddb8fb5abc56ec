#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cordel/rng.hpp"

// Run manifests: every CLI command writes a JSON record of the resolved
// flags, seeds and content hashes of its file inputs, enough to reproduce the
// run exactly.

namespace cordel {

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> flags;  // resolved values, stringified
  std::uint64_t seed = 0;
  std::string dataset_name;
  std::string timestamp_utc;
  std::map<std::string, std::string> input_hashes;  // path -> fnv1a64 hex
};

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string content_hash_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for hashing: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::uint64_t h = rng::fnv1a64(buf.str());
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

// Hashes every regular file directly inside a dataset directory, or the file
// itself when given a file path.
inline void hash_inputs_into(RunManifest& manifest, const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file()) {
        manifest.input_hashes[entry.path().string()] = content_hash_hex(entry.path());
      }
    }
  } else if (fs::is_regular_file(path)) {
    manifest.input_hashes[path.string()] = content_hash_hex(path);
  }
}

inline void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  nlohmann::json j{{"command", manifest.command},
                   {"flags", manifest.flags},
                   {"seed", manifest.seed},
                   {"dataset", manifest.dataset_name},
                   {"timestamp_utc", manifest.timestamp_utc},
                   {"input_hashes", manifest.input_hashes}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace cordel
