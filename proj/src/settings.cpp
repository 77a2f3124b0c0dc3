#include "summit/settings.hpp"

#include <cstdlib>
#include <fstream>

#include "summit/errors.hpp"

namespace summit {

EnvLookup process_env() {
    return [](const char* name) -> std::optional<std::string> {
        const char* v = std::getenv(name);
        if (!v) return std::nullopt;
        return std::string(v);
    };
}

nlohmann::json load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound(path.string());
    try {
        auto j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
        if (!j.is_object()) throw ConfigError("config file must hold an object: " + path.string());
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
}

std::optional<std::string> config_value(const nlohmann::json& config, std::string_view dotted_key) {
    const nlohmann::json* node = &config;
    std::size_t start = 0;
    while (start <= dotted_key.size()) {
        std::size_t dot = dotted_key.find('.', start);
        std::string part(dotted_key.substr(start, dot == std::string_view::npos ? std::string_view::npos
                                                                                : dot - start));
        if (!node->is_object() || !node->contains(part)) return std::nullopt;
        node = &(*node)[part];
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    if (node->is_null()) return std::nullopt;
    if (node->is_string()) return node->get<std::string>();
    if (node->is_number_integer()) return std::to_string(node->get<long long>());
    if (node->is_number()) return node->dump();
    if (node->is_boolean()) return node->get<bool>() ? "true" : "false";
    return std::nullopt;
}

std::string resolve_setting(const std::optional<std::string>& flag, const char* env_name,
                            const nlohmann::json& config, std::string_view dotted_key,
                            std::string fallback, const EnvLookup& env) {
    if (flag && !flag->empty()) return *flag;
    if (env_name) {
        if (auto v = env(env_name); v && !v->empty()) return *v;
    }
    if (auto v = config_value(config, dotted_key); v && !v->empty()) return *v;
    return fallback;
}

namespace {

int to_int(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string(what) + " must be an integer, got '" + s + "'");
    }
}

}  // namespace

OperatorSettings resolve_operator_settings(const OperatorFlags& flags, const nlohmann::json& config,
                                           const EnvLookup& env) {
    OperatorSettings s;
    s.base_url = resolve_setting(flags.base_url, "SUMMIT_BASE_URL", config, "backend.base_url",
                                 "https://api.openai.com/v1", env);
    s.model = resolve_setting(flags.model, "SUMMIT_MODEL", config, "backend.model",
                              "gpt-3.5-turbo", env);
    s.api_key = resolve_setting(std::nullopt, "SUMMIT_API_KEY", config, "backend.api_key", "", env);
    s.requests_per_minute =
        to_int(resolve_setting(flags.requests_per_minute, nullptr, config, "backend.rpm", "60", env),
               "backend.rpm");
    s.timeout_seconds = to_int(
        resolve_setting(std::nullopt, nullptr, config, "backend.timeout_s", "120", env),
        "backend.timeout_s");
    s.max_attempts = to_int(
        resolve_setting(std::nullopt, nullptr, config, "backend.max_attempts", "4", env),
        "backend.max_attempts");
    s.knowledge_endpoint =
        resolve_setting(flags.knowledge_endpoint, nullptr, config, "knowledge.endpoint", "", env);
    s.faithfulness_endpoint = resolve_setting(flags.faithfulness_endpoint, nullptr, config,
                                              "faithfulness.endpoint", "", env);
    if (s.requests_per_minute < 1) throw ConfigError("backend.rpm must be >= 1");
    if (s.timeout_seconds < 1) throw ConfigError("backend.timeout_s must be >= 1");
    if (s.max_attempts < 1) throw ConfigError("backend.max_attempts must be >= 1");
    return s;
}

}  // namespace summit
