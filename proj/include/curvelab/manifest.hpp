#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace curvelab {

inline constexpr const char* kVersion = "0.1.0";

/// manifest.json of an output directory. Written before any output, then
/// rewritten with the end time and output list.
struct RunManifest {
  std::string command;
  /// Effective configuration text; `--config manifest.json` reloads it.
  std::string config;
  std::string version = kVersion;
  std::uint64_t master_seed = 0;
  int workers = 1;
  std::string started;
  std::string finished;
  bool complete = false;
  std::vector<std::string> outputs;
  std::map<std::string, int> schemas;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

/// UTC timestamp, ISO 8601 to the second.
std::string utc_now();

/// Writes dir/manifest.json, creating dir. Throws ConfigError when a
/// manifest already exists and force is false.
void begin_run(const std::filesystem::path& dir, RunManifest& m, bool force);
/// Stamps the end time and rewrites the manifest.
void finish_run(const std::filesystem::path& dir, RunManifest& m);

}  // namespace curvelab
