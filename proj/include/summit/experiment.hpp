#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "summit/corpus.hpp"
#include "summit/metrics.hpp"
#include "summit/settings.hpp"
#include "summit/types.hpp"

namespace summit {

enum class BackendMode { Live, Scripted, Replay };
BackendMode parse_backend_mode(std::string_view name);
std::string_view to_string(BackendMode m);

/// Everything needed to re-run an experiment. Relative paths are resolved
/// against the manifest's directory at load time.
struct RunManifest {
    std::string name;
    SessionConfig config;
    std::filesystem::path corpus_path;
    CorpusSchema schema = CorpusSchema::Generic;
    SampleSpec sample;
    BackendMode backend = BackendMode::Scripted;
    std::optional<std::filesystem::path> script_path;
    std::optional<std::filesystem::path> cache_path;
    std::optional<std::filesystem::path> prompts_path;
    std::optional<std::filesystem::path> exemplars_path;
    std::size_t num_exemplars = 2;
    std::filesystem::path output_dir;
    std::size_t workers = 4;
    std::string version;
    /// Defaults to "<corpus>.peek.json".
    std::optional<std::filesystem::path> peek_ledger;

    static RunManifest load(const std::filesystem::path& path);
    static RunManifest from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
    nlohmann::json to_json() const;

    /// Throws ConfigError on inconsistent fields (e.g. scripted without a script).
    void validate() const;
};

/// The library version string written into manifests.
std::string summit_version();

struct DocumentFailure {
    std::string document_id;
    std::string kind;
    std::string message;
};

struct StageMetrics {
    std::optional<CorpusStats> rouge1, rouge2, rougeL, gpt_eval, faithfulness, topic_similarity;
};

struct RunStats {
    std::string run;
    std::size_t documents = 0;
    std::size_t completed = 0;
    std::vector<DocumentFailure> failures;
    double mean_iterations = 0.0;
    std::map<std::string, std::size_t> stopped_by;
    StageMetrics init, final;
    std::string prompt_fingerprint;
    std::string split;
    bool acknowledged_peek = false;

    nlohmann::json to_json() const;
    static RunStats from_json(const nlohmann::json& j);
};

struct RunOptions {
    bool acknowledge_peek = false;
    /// Overrides the manifest's backend mode (the replay subcommand).
    std::optional<BackendMode> force_mode;
    std::optional<std::filesystem::path> output_dir;
    OperatorSettings operator_settings;
};

struct RunOutcome {
    RunStats stats;
    Usage usage;
    std::filesystem::path output_dir;
    bool has_failures() const { return !stats.failures.empty(); }
};

/// Loads and samples the corpus (aborting before any backend call on error),
/// runs one session per document on `workers` threads, and writes
/// manifest.json, stats.json, usage.json, failures.jsonl and traces/ into the
/// output directory. Per-document failures are recorded, not thrown.
RunOutcome run_experiment(const RunManifest& manifest, const RunOptions& options);

struct CallEstimate {
    std::size_t documents = 0;
    std::size_t max_calls = 0;
    std::size_t expected_calls = 0;
    double mean_document_words = 0.0;
};

/// Projected backend calls: 2·max_iterations per document at most, and
/// 2·min(4, max_iterations) for a typical four-iteration convergence.
CallEstimate estimate_calls(const RunManifest& manifest);

enum class ReportStage { Init, Final, Both };
enum class ReportFormat { Text, Csv };

/// One row per run (two with ReportStage::Both), sorted by run name. ROUGE is
/// scaled ×100 with two decimals; GPT-Eval stays on the 1–5 scale. Missing
/// cells print U+2014. Throws MissingStats when a directory lacks stats.json.
std::string report(const std::vector<std::filesystem::path>& run_dirs, ReportStage stage,
                   ReportFormat format);

}  // namespace summit
