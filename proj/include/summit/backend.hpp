#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "summit/http.hpp"

namespace summit {

enum class MessageRole { System, User, Assistant };
std::string_view to_string(MessageRole r);

struct ChatMessage {
    MessageRole role;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct CompletionRequest {
    std::string model_id;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_output_tokens = 512;
    /// Session id + step; diagnostic only, never part of the cache key.
    std::string request_tag;

    /// Throws ConfigError unless messages are non-empty and start with a System message.
    void validate() const;
    /// Empty when the request has no user message.
    std::string_view last_user_message() const;
};

enum class ServedFrom { Live, Cache, Script };
std::string_view to_string(ServedFrom s);

struct TokenUsage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

struct CompletionResponse {
    std::string text;
    TokenUsage usage;
    ServedFrom served_from = ServedFrom::Live;
};

class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;
    virtual CompletionResponse complete(const CompletionRequest& request) = 0;
};

/// Hex SHA-256 over (model_id, temperature, max_output_tokens, messages in
/// order). request_tag is excluded so identical content collides.
std::string cache_key(const CompletionRequest& request);

// ---------------------------------------------------------------------------
// Scripted backend

struct ScriptStep {
    enum class Match { Any, Substring, Regex };
    Match match = Match::Any;
    std::string pattern;
    std::string response;
    /// A repeating step is never consumed.
    bool repeat = false;
    /// When set, matching this step throws TransportError(fail) instead.
    std::optional<std::string> fail;

    bool matches(std::string_view last_user_message) const;
};

/// Deterministic stand-in for a model. Each request is answered by the first
/// unconsumed step whose matcher accepts the last user message; positional
/// (Any) steps are therefore consumed strictly in order. Single consumer.
class ScriptedBackend final : public CompletionBackend {
public:
    explicit ScriptedBackend(std::vector<ScriptStep> steps);

    CompletionResponse complete(const CompletionRequest& request) override;

    std::size_t calls() const { return calls_; }
    std::size_t remaining() const;

private:
    std::vector<ScriptStep> steps_;
    std::vector<bool> consumed_;
    std::size_t calls_ = 0;
};

/// Script file: {"format":"summit-script","version":1,"steps":[...],
/// "documents":{"<doc id>":[...]}}. A document without its own list uses "steps".
class ScriptBook {
public:
    static ScriptBook load(const std::filesystem::path& path);
    static ScriptBook parse(std::string_view json_text);

    std::unique_ptr<ScriptedBackend> for_document(const std::string& document_id) const;

private:
    std::vector<ScriptStep> default_steps_;
    std::map<std::string, std::vector<ScriptStep>> per_document_;
};

// ---------------------------------------------------------------------------
// Response cache

struct CacheRecord {
    std::string key;
    std::string model_id;
    std::string request_tag;
    std::string text;
    TokenUsage usage;
};

/// Content-addressed store of completions, optionally persisted to an
/// append-only JSONL file whose first line is a version header. Thread-safe.
class ResponseCache {
public:
    ResponseCache() = default;
    /// Loads existing records from `path` (created if absent) and appends new ones.
    explicit ResponseCache(const std::filesystem::path& path);

    std::optional<CacheRecord> lookup(const std::string& key) const;
    /// First write wins; storing an existing key is a no-op.
    void store(CacheRecord record);
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::unordered_map<std::string, CacheRecord> records_;
    std::optional<std::ofstream> out_;
};

/// Serves from the cache when possible, otherwise forwards to `inner` and
/// records the reply. A null `inner` is replay mode: every miss throws CacheMiss.
class CachedBackend final : public CompletionBackend {
public:
    CachedBackend(std::shared_ptr<ResponseCache> cache, std::shared_ptr<CompletionBackend> inner);
    CompletionResponse complete(const CompletionRequest& request) override;

private:
    std::shared_ptr<ResponseCache> cache_;
    std::shared_ptr<CompletionBackend> inner_;
};

// ---------------------------------------------------------------------------
// Time

class Clock {
public:
    using time_point = std::chrono::steady_clock::time_point;
    virtual ~Clock() = default;
    virtual time_point now() = 0;
    virtual void sleep_until(time_point t) = 0;
    void sleep_for(std::chrono::milliseconds d) { sleep_until(now() + d); }
};

class SystemClock final : public Clock {
public:
    time_point now() override { return std::chrono::steady_clock::now(); }
    void sleep_until(time_point t) override;
};

/// Starts at the epoch; sleeping advances time instantly. Thread-safe.
class VirtualClock final : public Clock {
public:
    time_point now() override;
    void sleep_until(time_point t) override;
    void advance(std::chrono::milliseconds d);

private:
    std::mutex mu_;
    time_point now_{};
};

// ---------------------------------------------------------------------------
// Live client

struct RetryPolicy {
    int max_attempts = 4;
    std::chrono::milliseconds base_delay{1000};
    std::chrono::milliseconds max_delay{30000};

    /// base · 2^(attempt-1), capped at max_delay. attempt is 1-based.
    std::chrono::milliseconds delay_after(int attempt) const;
};

struct LiveConfig {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key;
    std::chrono::milliseconds timeout{120000};
    RetryPolicy retry;
};

/// OpenAI-compatible chat-completions client: POST {base_url}/chat/completions.
/// Retries transport failures, 429 and 5xx with exponential backoff; 401/403
/// fail immediately with AuthError.
class LiveBackend final : public CompletionBackend {
public:
    LiveBackend(LiveConfig config, std::shared_ptr<HttpTransport> transport = nullptr,
                std::shared_ptr<Clock> clock = nullptr);

    CompletionResponse complete(const CompletionRequest& request) override;

    /// Network attempts made over the backend's lifetime.
    std::int64_t attempts() const { return attempts_.load(); }

    static std::string request_body(const CompletionRequest& request);
    /// Throws BackendError when the body is not a chat-completions reply.
    static CompletionResponse parse_response_body(std::string_view body);

private:
    LiveConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    std::shared_ptr<Clock> clock_;
    std::atomic<std::int64_t> attempts_{0};
};

// ---------------------------------------------------------------------------
// Rate limiting

/// At most `rpm` acquisitions in any 60 s sliding window. Each caller reserves
/// the earliest permissible slot under the lock, then sleeps outside it.
class RateLimiter {
public:
    RateLimiter(int requests_per_minute, std::shared_ptr<Clock> clock);

    /// Blocks until a dispatch is permitted; returns the dispatch time.
    Clock::time_point acquire();
    std::vector<Clock::time_point> dispatch_log() const;
    int requests_per_minute() const { return rpm_; }

private:
    int rpm_;
    std::shared_ptr<Clock> clock_;
    mutable std::mutex mu_;
    std::deque<Clock::time_point> window_;
    std::vector<Clock::time_point> log_;
};

class ThrottledBackend final : public CompletionBackend {
public:
    ThrottledBackend(std::shared_ptr<CompletionBackend> inner, std::shared_ptr<RateLimiter> limiter);
    CompletionResponse complete(const CompletionRequest& request) override;

private:
    std::shared_ptr<CompletionBackend> inner_;
    std::shared_ptr<RateLimiter> limiter_;
};

/// Wraps `inner` so that its dispatches respect `requests_per_minute`.
/// Put the cache outside the throttle so hits are never delayed.
std::shared_ptr<ThrottledBackend> throttle(std::shared_ptr<CompletionBackend> inner,
                                           int requests_per_minute,
                                           std::shared_ptr<Clock> clock = nullptr);

}  // namespace summit
