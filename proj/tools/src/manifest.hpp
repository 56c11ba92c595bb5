#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace uat::cli {

/// Record of one command run. Everything except the two timestamps is a
/// function of the arguments.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::vector<std::pair<std::string, std::string>> flags;
  std::vector<std::uint64_t> seeds;
  std::string tool_version;
  std::string started;
  std::string finished;
  std::vector<std::string> outputs;
  int exit_code = 0;
};

std::string utc_now();
std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

/// <dir>/<stem><suffix> next to `path`.
std::filesystem::path sibling(const std::filesystem::path& path, const std::string& suffix);

}  // namespace uat::cli
