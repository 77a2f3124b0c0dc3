#include <algorithm>
#include <thread>

#include <nlohmann/json.hpp>

#include "summit/backend.hpp"
#include "summit/errors.hpp"

namespace summit {
namespace {

bool is_transient(int status) { return status == 0 || status == 429 || status >= 500; }

std::string join_url(const std::string& base, std::string_view path) {
    std::string out = base;
    while (!out.empty() && out.back() == '/') out.pop_back();
    out += path;
    return out;
}

}  // namespace

std::chrono::milliseconds RetryPolicy::delay_after(int attempt) const {
    auto d = base_delay;
    for (int i = 1; i < attempt && d < max_delay; ++i) d *= 2;
    return std::min(d, max_delay);
}

LiveBackend::LiveBackend(LiveConfig config, std::shared_ptr<HttpTransport> transport,
                         std::shared_ptr<Clock> clock)
    : config_(std::move(config)), transport_(std::move(transport)), clock_(std::move(clock)) {
    if (config_.base_url.empty()) throw ConfigError("live backend needs a base URL");
    if (config_.retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
    if (!transport_) transport_ = make_http_transport();
    if (!clock_) clock_ = std::make_shared<SystemClock>();
}

std::string LiveBackend::request_body(const CompletionRequest& request) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    }
    return nlohmann::json{{"model", request.model_id},
                          {"messages", std::move(messages)},
                          {"temperature", request.temperature},
                          {"max_tokens", request.max_output_tokens}}
        .dump();
}

CompletionResponse LiveBackend::parse_response_body(std::string_view body) {
    try {
        auto j = nlohmann::json::parse(body);
        CompletionResponse r;
        const auto& content = j.at("choices").at(0).at("message").at("content");
        r.text = content.is_null() ? std::string() : content.get<std::string>();
        if (j.contains("usage") && j["usage"].is_object()) {
            r.usage.prompt_tokens = j["usage"].value("prompt_tokens", std::int64_t{0});
            r.usage.completion_tokens = j["usage"].value("completion_tokens", std::int64_t{0});
        }
        r.served_from = ServedFrom::Live;
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("malformed chat-completions reply: ") + e.what());
    }
}

CompletionResponse LiveBackend::complete(const CompletionRequest& request) {
    request.validate();
    HttpRequest http;
    http.url = join_url(config_.base_url, "/chat/completions");
    http.body = request_body(request);
    http.read_timeout = config_.timeout;
    if (!config_.api_key.empty()) {
        http.headers.emplace_back("Authorization", "Bearer " + config_.api_key);
    }

    std::string last_error;
    const int max_attempts = config_.retry.max_attempts;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        ++attempts_;
        HttpResponse resp = transport_->post(http);
        if (resp.status == 401 || resp.status == 403) throw AuthError(resp.status);
        if (resp.status >= 200 && resp.status < 300) return parse_response_body(resp.body);
        last_error = resp.status == 0 ? resp.error
                                      : "HTTP " + std::to_string(resp.status) + ": " +
                                            resp.body.substr(0, 200);
        if (!is_transient(resp.status)) throw TransportError(last_error, attempt);
        if (attempt < max_attempts) clock_->sleep_for(config_.retry.delay_after(attempt));
    }
    throw TransportError(last_error, max_attempts);
}

}  // namespace summit
