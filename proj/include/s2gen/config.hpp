#ifndef S2GEN_CONFIG_HPP
#define S2GEN_CONFIG_HPP

#include <filesystem>
#include <string>

#include "s2gen/generator.hpp"

namespace s2gen {

struct RunConfig {
    std::string command = "generate";
    GenConfig gen;
};

/// Parse and validate a JSON config file. Unknown keys are rejected and all
/// constraint violations are reported together in ConfigError::issues.
RunConfig load_config(const std::filesystem::path& path);

RunConfig parse_config_json(const std::string& json_text);

/// Effective configuration (defaults applied), echoed into every manifest.
std::string config_to_json(const GenConfig& cfg);

/// manifest.json contents for a finished dataset run.
std::string manifest_to_json(const DatasetManifest& manifest, const GenConfig& cfg);

}  // namespace s2gen

#endif
