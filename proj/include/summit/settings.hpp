#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace summit {

/// Environment lookup; swapped out in tests.
using EnvLookup = std::function<std::optional<std::string>(const char*)>;
EnvLookup process_env();

/// Nested key-value config file (JSON). Missing file → FileNotFound.
nlohmann::json load_config_file(const std::filesystem::path& path);

/// Dotted-path lookup ("backend.base_url") rendered as a string; numbers and
/// booleans are stringified. Empty when absent or null.
std::optional<std::string> config_value(const nlohmann::json& config, std::string_view dotted_key);

/// flag > environment variable > config file > fallback. Empty strings count
/// as unset at every level. `env_name` may be null for settings without one.
std::string resolve_setting(const std::optional<std::string>& flag, const char* env_name,
                            const nlohmann::json& config, std::string_view dotted_key,
                            std::string fallback, const EnvLookup& env);

/// Operator-level settings shared by every subcommand.
struct OperatorSettings {
    std::string base_url;
    std::string model;
    std::string api_key;
    int requests_per_minute = 60;
    int timeout_seconds = 120;
    int max_attempts = 4;
    std::string knowledge_endpoint;
    std::string faithfulness_endpoint;
};

struct OperatorFlags {
    std::optional<std::string> base_url;
    std::optional<std::string> model;
    std::optional<std::string> requests_per_minute;
    std::optional<std::string> knowledge_endpoint;
    std::optional<std::string> faithfulness_endpoint;
};

/// Resolves every operator setting with the precedence above. Env vars:
/// SUMMIT_API_KEY, SUMMIT_BASE_URL, SUMMIT_MODEL. Throws ConfigError on
/// non-numeric numeric settings.
OperatorSettings resolve_operator_settings(const OperatorFlags& flags, const nlohmann::json& config,
                                           const EnvLookup& env);

}  // namespace summit
