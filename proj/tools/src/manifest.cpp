#include "manifest.hpp"

#include <chrono>
#include <ctime>

#include "json.hpp"
#include "uat/error.hpp"
#include "uat/json_io.hpp"

namespace uat::cli {

using Json = nlohmann::ordered_json;

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_to_json(const RunManifest& m) {
  Json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  Json flags = Json::object();
  for (const auto& [k, v] : m.flags) flags[k] = v;
  j["flags"] = flags;
  j["seeds"] = m.seeds;
  j["tool_version"] = m.tool_version;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["outputs"] = m.outputs;
  j["exit_code"] = m.exit_code;
  return canonical_json(j.dump());
}

RunManifest manifest_from_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    for (const auto& [k, v] : j.at("flags").items()) m.flags.emplace_back(k, v.get<std::string>());
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.exit_code = j.at("exit_code").get<int>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
}

std::filesystem::path sibling(const std::filesystem::path& path, const std::string& suffix) {
  return path.parent_path() / (path.stem().string() + suffix);
}

}  // namespace uat::cli
