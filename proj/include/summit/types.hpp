#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace summit {

enum class Role { Summarizer, Evaluator };
enum class Setting { Quality, Control, Faithfulness };
enum class Stage { Summarize, Refine, Evaluate };

std::string_view to_string(Role r);
std::string_view to_string(Setting s);
std::string_view to_string(Stage s);
/// Case-insensitive; throws ConfigError on unknown names.
Setting parse_setting(std::string_view name);
Role parse_role(std::string_view name);
Stage parse_stage(std::string_view name);

struct Document {
    std::string id;
    std::string text;
    std::vector<std::string> reference_summaries;
    std::vector<std::string> topics;
};

enum class SummaryOrigin { Initial, Refined, Unchanged };
std::string_view to_string(SummaryOrigin o);
SummaryOrigin parse_summary_origin(std::string_view name);

struct Summary {
    std::string text;
    int iteration = 0;
    SummaryOrigin origin = SummaryOrigin::Initial;

    bool operator==(const Summary&) const = default;
};

enum class EditKind { Add, Remove, Rephrase, Simplify, Keep };
std::string_view to_string(EditKind k);
EditKind parse_edit_kind(std::string_view name);

/// One evaluator suggestion. Add/Remove/Rephrase carry a non-empty target;
/// Simplify and Keep carry none.
struct EditOp {
    EditKind kind = EditKind::Keep;
    std::optional<std::string> target;

    static EditOp add(std::string t) { return {EditKind::Add, std::move(t)}; }
    static EditOp remove(std::string t) { return {EditKind::Remove, std::move(t)}; }
    static EditOp rephrase(std::string t) { return {EditKind::Rephrase, std::move(t)}; }
    static EditOp simplify() { return {EditKind::Simplify, std::nullopt}; }
    static EditOp keep() { return {EditKind::Keep, std::nullopt}; }

    bool operator==(const EditOp&) const = default;
};

/// Probability per score 1..5; index 0 holds score 1.
using ScoreDistribution = std::array<double, 5>;

enum class ParseQuality {
    Parsed,        // distribution found and already normalized
    Renormalized,  // distribution found, rescaled to sum 1
    Unparsed,      // no distribution; uniform substituted
    Synthesized,   // no evaluator call was made (degenerate input)
};
std::string_view to_string(ParseQuality q);
ParseQuality parse_parse_quality(std::string_view name);

struct Feedback {
    std::string raw;
    ScoreDistribution score_distribution{0.2, 0.2, 0.2, 0.2, 0.2};
    double expected_score = 3.0;
    std::vector<EditOp> edit_ops;
    bool stop_requested = false;
    ParseQuality parse_quality = ParseQuality::Unparsed;

    bool operator==(const Feedback&) const = default;
};

struct Exemplar {
    std::string document;
    std::string summary;
    /// Present for evaluator exemplars only.
    std::optional<std::string> explanation;
};

struct DecodingParams {
    double temperature = 0.0;
    int max_output_tokens = 512;
};

struct SessionConfig {
    int max_iterations = 5;
    Setting setting = Setting::Quality;
    std::optional<std::string> topic_query;
    std::vector<Exemplar> exemplars;
    DecodingParams decoding;
    std::string model_id = "gpt-3.5-turbo";
    std::string stop_marker = "<STOP>";
    bool strict_parsing = false;
    /// Documents with fewer tokens get one summarize call and no evaluation.
    int min_document_tokens = 10;
    /// Prompt + completion tokens per session; unset means unlimited.
    std::optional<std::int64_t> token_budget;
    /// Cap on triplets rendered into faithfulness prompts.
    int max_triplets = 20;

    /// Throws ConfigError when the invariants do not hold.
    void validate() const;
};

enum class StopReason { EvaluatorStop, MaxIterations, KeepOnly };
std::string_view to_string(StopReason r);
StopReason parse_stop_reason(std::string_view name);

struct Usage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::int64_t cache_hits = 0;
    std::int64_t live_calls = 0;
    std::int64_t script_calls = 0;

    Usage& operator+=(const Usage& o);
    std::int64_t total_tokens() const { return prompt_tokens + completion_tokens; }
    std::int64_t calls() const { return cache_hits + live_calls + script_calls; }
    bool operator==(const Usage&) const = default;
};

struct TraceStep {
    Summary summary;
    Feedback feedback;
    /// User prompt that produced `summary` (Summarize for step 1, Refine after).
    std::string summarizer_prompt;
    /// Empty when no evaluator call was made.
    std::string evaluator_prompt;
    Usage usage;
};

struct SessionTrace {
    std::string document_id;
    SessionConfig config;
    std::vector<TraceStep> steps;
    StopReason stopped_by = StopReason::MaxIterations;
    Usage usage;

    const Summary& initial_summary() const { return steps.front().summary; }
    const Summary& final_summary() const { return steps.back().summary; }
};

}  // namespace summit
