#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace summit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or usage: bad flags, missing topic, unreadable manifest.
class ConfigError : public Error {
public:
    using Error::Error;
};

class FileNotFound : public ConfigError {
public:
    explicit FileNotFound(const std::string& path)
        : ConfigError("file not found: " + path), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Any failure to obtain a completion from a backend.
class BackendError : public Error {
public:
    using Error::Error;
};

/// Network or HTTP failure that persisted through every retry.
class TransportError : public BackendError {
public:
    TransportError(const std::string& detail, int attempts)
        : BackendError("transport failure after " + std::to_string(attempts) +
                       " attempt(s): " + detail),
          attempts_(attempts) {}
    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

/// 401/403 from the completion endpoint. Never retried.
class AuthError : public BackendError {
public:
    explicit AuthError(int status)
        : BackendError("authentication rejected (HTTP " + std::to_string(status) +
                       "); check SUMMIT_API_KEY"),
          status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

class ScriptExhausted : public BackendError {
public:
    explicit ScriptExhausted(const std::string& detail)
        : BackendError("script exhausted: " + detail) {}
};

/// Replay mode found no cached response for a request.
class CacheMiss : public BackendError {
public:
    explicit CacheMiss(const std::string& key)
        : BackendError("no cached response for key " + key + " (replay mode)"), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class BudgetExceeded : public Error {
public:
    BudgetExceeded(long long used, long long budget)
        : Error("token budget exceeded: used " + std::to_string(used) + " of " +
                std::to_string(budget)) {}
};

/// Strict-mode failure to parse evaluator output.
class ParseError : public Error {
public:
    using Error::Error;
};

class MissingSlot : public Error {
public:
    explicit MissingSlot(std::string slot)
        : Error("missing prompt slot: " + slot), slot_(std::move(slot)) {}
    const std::string& slot() const noexcept { return slot_; }

private:
    std::string slot_;
};

class RemoteUnavailable : public Error {
public:
    using Error::Error;
};

class DegenerateDistribution : public Error {
public:
    DegenerateDistribution() : Error("score distribution has zero total mass") {}
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class SchemaViolation : public Error {
public:
    SchemaViolation(const std::string& what, std::vector<int> lines)
        : Error(what), lines_(std::move(lines)) {}
    const std::vector<int>& lines() const noexcept { return lines_; }

private:
    std::vector<int> lines_;
};

class SampleTooLarge : public Error {
public:
    SampleTooLarge(std::size_t requested, std::size_t available)
        : Error("sample of " + std::to_string(requested) + " requested from " +
                std::to_string(available) + " records") {}
};

class MissingStats : public Error {
public:
    explicit MissingStats(const std::string& dir)
        : Error("run directory has no manifest/stats: " + dir) {}
};

}  // namespace summit
