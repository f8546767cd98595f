#pragma once

#include <ctime>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vident/errors.hpp"
#include "vident/io.hpp"

// Every CLI run writes one manifest: the command, its arguments, the seeds
// in play, and checksummed inputs/outputs. Re-running the recorded argv
// against the recorded inputs must reproduce the recorded output checksums.

namespace vident {

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // full argument vector after the program name
  std::string config_path;        // empty when the command takes no config
  std::map<std::string, uint64_t> seeds;
  std::vector<std::pair<std::string, uint64_t>> inputs;   // path -> content checksum
  std::vector<std::pair<std::string, uint64_t>> outputs;  // path -> content checksum
  std::string timestamp;  // UTC, informational only; excluded from replay checks
};

inline std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void save_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["config"] = m.config_path;
  nlohmann::ordered_json seeds = nlohmann::ordered_json::object();
  for (const auto& [name, value] : m.seeds) seeds[name] = value;
  j["seeds"] = seeds;
  auto files = [](const std::vector<std::pair<std::string, uint64_t>>& list) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [p, sum] : list) arr.push_back({{"path", p}, {"checksum", sum}});
    return arr;
  };
  j["inputs"] = files(m.inputs);
  j["outputs"] = files(m.outputs);
  j["timestamp"] = m.timestamp;
  write_file(path, j.dump(2) + "\n");
}

inline RunManifest load_manifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad manifest: " + e.what());
  }
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.config_path = j.at("config").get<std::string>();
    for (const auto& [name, value] : j.at("seeds").items())
      m.seeds[name] = value.get<uint64_t>();
    for (const auto& f : j.at("inputs"))
      m.inputs.emplace_back(f.at("path").get<std::string>(), f.at("checksum").get<uint64_t>());
    for (const auto& f : j.at("outputs"))
      m.outputs.emplace_back(f.at("path").get<std::string>(), f.at("checksum").get<uint64_t>());
    m.timestamp = j.value("timestamp", "");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad manifest: " + e.what());
  }
  return m;
}

}  // namespace vident
