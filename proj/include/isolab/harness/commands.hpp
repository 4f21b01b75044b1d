#pragma once

#include <string>

#include <json.hpp>

namespace isolab {

struct CommandResult {
    nlohmann::json report;
    std::string csv;    // sidecar table, empty when the command has none
    int exit_code = 0;  // 0 ok, 1 threshold exceeded, 2 error
};

// Commands: "roundtrip", "limits", "stokes", "jmms", "convert". The config is
// a JSON object; missing keys take defaults and the resolved config is embedded
// in the report. Errors from the library are reported in the JSON, not thrown,
// except ConfigError for malformed configs.
CommandResult run_command(const std::string& command, const nlohmann::json& config);

CommandResult cmd_roundtrip(const nlohmann::json& config);
CommandResult cmd_limits(const nlohmann::json& config);
CommandResult cmd_stokes(const nlohmann::json& config);
CommandResult cmd_jmms(const nlohmann::json& config);
CommandResult cmd_convert(const nlohmann::json& config);

}  // namespace isolab
