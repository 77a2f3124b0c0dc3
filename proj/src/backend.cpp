#include "summit/backend.hpp"

#include <cstdio>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "digest.hpp"
#include "summit/errors.hpp"

namespace summit {

std::string_view to_string(MessageRole r) {
    switch (r) {
        case MessageRole::System: return "system";
        case MessageRole::User: return "user";
        case MessageRole::Assistant: return "assistant";
    }
    return "?";
}

std::string_view to_string(ServedFrom s) {
    switch (s) {
        case ServedFrom::Live: return "live";
        case ServedFrom::Cache: return "cache";
        case ServedFrom::Script: return "script";
    }
    return "?";
}

void CompletionRequest::validate() const {
    if (messages.empty()) throw ConfigError("completion request has no messages");
    if (messages.front().role != MessageRole::System) {
        throw ConfigError("completion request must start with a system message");
    }
    if (model_id.empty()) throw ConfigError("completion request has no model id");
    if (max_output_tokens < 1) throw ConfigError("max_output_tokens must be >= 1");
}

std::string_view CompletionRequest::last_user_message() const {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == MessageRole::User) return it->content;
    }
    return {};
}

std::string cache_key(const CompletionRequest& request) {
    // Length-prefixed fields keep the encoding injective.
    std::string blob = "summit-cache-key/v1\n";
    auto field = [&blob](std::string_view s) {
        blob += std::to_string(s.size());
        blob += ':';
        blob += s;
        blob += '\n';
    };
    char temp[64];
    std::snprintf(temp, sizeof temp, "%.17g", request.temperature);
    field(request.model_id);
    field(temp);
    field(std::to_string(request.max_output_tokens));
    field(std::to_string(request.messages.size()));
    for (const auto& m : request.messages) {
        field(to_string(m.role));
        field(m.content);
    }
    return detail::sha256_hex(blob);
}

// ---------------------------------------------------------------------------

bool ScriptStep::matches(std::string_view last_user_message) const {
    switch (match) {
        case Match::Any: return true;
        case Match::Substring: return last_user_message.find(pattern) != std::string_view::npos;
        case Match::Regex:
            return std::regex_search(last_user_message.begin(), last_user_message.end(),
                                     std::regex(pattern));
    }
    return false;
}

ScriptedBackend::ScriptedBackend(std::vector<ScriptStep> steps)
    : steps_(std::move(steps)), consumed_(steps_.size(), false) {}

CompletionResponse ScriptedBackend::complete(const CompletionRequest& request) {
    request.validate();
    ++calls_;
    std::string_view user = request.last_user_message();
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (consumed_[i] || !steps_[i].matches(user)) continue;
        const ScriptStep& step = steps_[i];
        if (!step.repeat) consumed_[i] = true;
        if (step.fail) throw TransportError(*step.fail, 1);
        TokenUsage usage{static_cast<std::int64_t>(user.size() / 4),
                         static_cast<std::int64_t>(step.response.size() / 4)};
        return {step.response, usage, ServedFrom::Script};
    }
    std::string preview(user.substr(0, 60));
    throw ScriptExhausted("no remaining step matches request '" + request.request_tag +
                          "' (last user message starts: \"" + preview + "\")");
}

std::size_t ScriptedBackend::remaining() const {
    std::size_t n = 0;
    for (bool c : consumed_) n += c ? 0 : 1;
    return n;
}

namespace {

std::vector<ScriptStep> parse_steps(const nlohmann::json& arr) {
    std::vector<ScriptStep> steps;
    for (const auto& j : arr) {
        ScriptStep s;
        if (j.contains("match")) {
            s.match = ScriptStep::Match::Substring;
            s.pattern = j.at("match").get<std::string>();
        } else if (j.contains("regex")) {
            s.match = ScriptStep::Match::Regex;
            s.pattern = j.at("regex").get<std::string>();
            try {
                std::regex check(s.pattern);
            } catch (const std::regex_error& e) {
                throw ConfigError("script step has invalid regex '" + s.pattern + "': " + e.what());
            }
        }
        s.repeat = j.value("repeat", false);
        if (j.contains("fail")) {
            s.fail = j.at("fail").get<std::string>();
        } else {
            s.response = j.at("response").get<std::string>();
        }
        steps.push_back(std::move(s));
    }
    return steps;
}

}  // namespace

ScriptBook ScriptBook::parse(std::string_view json_text) {
    ScriptBook book;
    try {
        auto j = nlohmann::json::parse(json_text);
        if (j.value("format", "") != "summit-script" || j.value("version", 0) != 1) {
            throw ConfigError("script must declare format summit-script, version 1");
        }
        if (j.contains("steps")) book.default_steps_ = parse_steps(j["steps"]);
        if (j.contains("documents")) {
            for (const auto& [id, steps] : j["documents"].items()) {
                book.per_document_[id] = parse_steps(steps);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed script: ") + e.what());
    }
    return book;
}

ScriptBook ScriptBook::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound(path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::unique_ptr<ScriptedBackend> ScriptBook::for_document(const std::string& document_id) const {
    auto it = per_document_.find(document_id);
    return std::make_unique<ScriptedBackend>(it != per_document_.end() ? it->second
                                                                       : default_steps_);
}

// ---------------------------------------------------------------------------

namespace {

constexpr const char* kCacheFormat = "summit-cache";

std::string cache_header() {
    return nlohmann::json{{"format", kCacheFormat}, {"version", 1}}.dump();
}

}  // namespace

ResponseCache::ResponseCache(const std::filesystem::path& path) {
    bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    if (!fresh) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw FileNotFound(path.string());
        std::string line;
        std::getline(in, line);
        nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
        if (header.is_discarded() || header.value("format", "") != kCacheFormat ||
            header.value("version", 0) != 1) {
            throw ConfigError("not a summit-cache v1 file: " + path.string());
        }
        while (std::getline(in, line)) {
            auto j = nlohmann::json::parse(line, nullptr, false);
            // A torn final line from an interrupted run is skipped.
            if (j.is_discarded() || !j.is_object() || !j.contains("key")) continue;
            CacheRecord r;
            r.key = j.value("key", "");
            r.model_id = j.value("model", "");
            r.request_tag = j.value("tag", "");
            r.text = j.value("text", "");
            if (j.contains("usage")) {
                r.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
                r.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
            }
            records_.try_emplace(r.key, std::move(r));
        }
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.emplace(path, std::ios::binary | std::ios::app);
    if (!*out_) throw ConfigError("cannot open cache file for append: " + path.string());
    if (fresh) *out_ << cache_header() << '\n' << std::flush;
}

std::optional<CacheRecord> ResponseCache::lookup(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = records_.find(key);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

void ResponseCache::store(CacheRecord record) {
    std::lock_guard lock(mu_);
    if (records_.count(record.key)) return;
    if (out_) {
        nlohmann::json j{{"key", record.key},
                         {"model", record.model_id},
                         {"tag", record.request_tag},
                         {"text", record.text},
                         {"usage",
                          {{"prompt_tokens", record.usage.prompt_tokens},
                           {"completion_tokens", record.usage.completion_tokens}}}};
        *out_ << j.dump() << '\n' << std::flush;
    }
    std::string key = record.key;
    records_.emplace(std::move(key), std::move(record));
}

std::size_t ResponseCache::size() const {
    std::lock_guard lock(mu_);
    return records_.size();
}

CachedBackend::CachedBackend(std::shared_ptr<ResponseCache> cache,
                             std::shared_ptr<CompletionBackend> inner)
    : cache_(std::move(cache)), inner_(std::move(inner)) {
    if (!cache_) throw ConfigError("CachedBackend requires a cache");
}

CompletionResponse CachedBackend::complete(const CompletionRequest& request) {
    request.validate();
    std::string key = cache_key(request);
    if (auto hit = cache_->lookup(key)) return {hit->text, hit->usage, ServedFrom::Cache};
    if (!inner_) throw CacheMiss(key);
    CompletionResponse resp = inner_->complete(request);
    cache_->store({key, request.model_id, request.request_tag, resp.text, resp.usage});
    return resp;
}

}  // namespace summit
