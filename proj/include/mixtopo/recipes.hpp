#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixtopo/config.hpp"

namespace mixtopo {

inline constexpr const char* kVersion = "0.1.0";

struct TaskRecord {
  std::string name;
  bool ok = true;
  bool config_error = false;
  std::string message;
  std::vector<std::string> outputs;
};

/// Record of one CLI run, written as manifest.json once every task finished.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::string version = kVersion;
  std::string started_at;
  std::string finished_at;
  std::vector<TaskRecord> tasks;

  bool ok() const;
  bool has_config_error() const;
  nlohmann::json to_json() const;
};

/// Subcommand names accepted by run_command.
const std::vector<std::string>& command_names();

/// Runs a subcommand, writing its files into config.output_dir followed by the
/// manifest. Configuration problems discovered before any task runs throw
/// ConfigError; task failures are recorded in the manifest.
RunManifest run_command(const std::string& command, const RunConfig& config);

RunManifest cmd_spectrum(const RunConfig& config);
RunManifest cmd_egp_profile(const RunConfig& config);
RunManifest cmd_egp_winding(const RunConfig& config);
RunManifest cmd_invariant_scan(const RunConfig& config);
RunManifest cmd_chern(const RunConfig& config);
RunManifest cmd_gauge_reduction(const RunConfig& config);

/// Writes `text` to `path` through a temporary file and rename.
void write_file_atomically(const std::string& path, const std::string& text);

}  // namespace mixtopo
