#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "harvest/sim.hpp"

namespace harvest {

struct ExperimentConfig {
  std::size_t run_count = 1;
  std::uint64_t base_seed = 1;
  std::string output_dir = "out";
};

struct RunConfig {
  HarvestSetup setup;
  ExperimentConfig experiment;
};

/// Builds and validates a run configuration. Errors name the offending
/// field as section.key.
RunConfig parse_run_config(const nlohmann::json& doc);

nlohmann::json load_json_file(const std::filesystem::path& path);

/// Applies "section.key=value"; value is read as JSON, else as a string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// FNV-1a 64 of the compact serialisation, as 16 hex digits.
std::string config_digest(const nlohmann::json& doc);

}  // namespace harvest
