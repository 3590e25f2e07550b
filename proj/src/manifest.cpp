#include "curvelab/manifest.hpp"

#include "curvelab/config.hpp"
#include "curvelab/io.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <ctime>

namespace curvelab {

std::string RunManifest::to_json() const {
  nlohmann::json j{{"schema", 1},
                   {"command", command},
                   {"version", version},
                   {"master_seed", master_seed},
                   {"workers", workers},
                   {"started", started},
                   {"finished", finished.empty() ? nlohmann::json() : nlohmann::json(finished)},
                   {"complete", complete},
                   {"outputs", outputs},
                   {"schemas", schemas},
                   {"config", config}};
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("manifest is not a JSON object");
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.workers = j.at("workers").get<int>();
    m.started = j.at("started").get<std::string>();
    if (!j.at("finished").is_null()) m.finished = j.at("finished").get<std::string>();
    m.complete = j.at("complete").get<bool>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.schemas = j.at("schemas").get<std::map<std::string, int>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void begin_run(const std::filesystem::path& dir, RunManifest& m, bool force) {
  const auto path = dir / "manifest.json";
  if (std::filesystem::exists(path) && !force)
    throw ConfigError(path.string() + " exists; pass --force to overwrite the run");
  std::filesystem::create_directories(dir);
  m.started = utc_now();
  m.finished.clear();
  m.complete = false;
  io::write_text(path, m.to_json());
}

void finish_run(const std::filesystem::path& dir, RunManifest& m) {
  m.finished = utc_now();
  io::write_text(dir / "manifest.json", m.to_json());
}

}  // namespace curvelab
