#include "summit/types.hpp"

#include <algorithm>
#include <cctype>

#include "summit/errors.hpp"

namespace summit {
namespace {

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

template <typename E, std::size_t N>
E parse_enum(std::string_view name, const std::array<E, N>& values, std::string_view what) {
    for (E v : values) {
        if (iequals(name, to_string(v))) return v;
    }
    throw ConfigError("unknown " + std::string(what) + ": '" + std::string(name) + "'");
}

}  // namespace

std::string_view to_string(Role r) {
    switch (r) {
        case Role::Summarizer: return "summarizer";
        case Role::Evaluator: return "evaluator";
    }
    return "?";
}

std::string_view to_string(Setting s) {
    switch (s) {
        case Setting::Quality: return "quality";
        case Setting::Control: return "control";
        case Setting::Faithfulness: return "faithfulness";
    }
    return "?";
}

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::Summarize: return "summarize";
        case Stage::Refine: return "refine";
        case Stage::Evaluate: return "evaluate";
    }
    return "?";
}

std::string_view to_string(SummaryOrigin o) {
    switch (o) {
        case SummaryOrigin::Initial: return "initial";
        case SummaryOrigin::Refined: return "refined";
        case SummaryOrigin::Unchanged: return "unchanged";
    }
    return "?";
}

std::string_view to_string(EditKind k) {
    switch (k) {
        case EditKind::Add: return "add";
        case EditKind::Remove: return "remove";
        case EditKind::Rephrase: return "rephrase";
        case EditKind::Simplify: return "simplify";
        case EditKind::Keep: return "keep";
    }
    return "?";
}

std::string_view to_string(ParseQuality q) {
    switch (q) {
        case ParseQuality::Parsed: return "parsed";
        case ParseQuality::Renormalized: return "renormalized";
        case ParseQuality::Unparsed: return "unparsed";
        case ParseQuality::Synthesized: return "synthesized";
    }
    return "?";
}

std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::EvaluatorStop: return "evaluator_stop";
        case StopReason::MaxIterations: return "max_iterations";
        case StopReason::KeepOnly: return "keep_only";
    }
    return "?";
}

Setting parse_setting(std::string_view name) {
    return parse_enum(name, std::array{Setting::Quality, Setting::Control, Setting::Faithfulness},
                      "setting");
}

Role parse_role(std::string_view name) {
    return parse_enum(name, std::array{Role::Summarizer, Role::Evaluator}, "role");
}

Stage parse_stage(std::string_view name) {
    return parse_enum(name, std::array{Stage::Summarize, Stage::Refine, Stage::Evaluate}, "stage");
}

SummaryOrigin parse_summary_origin(std::string_view name) {
    return parse_enum(
        name, std::array{SummaryOrigin::Initial, SummaryOrigin::Refined, SummaryOrigin::Unchanged},
        "summary origin");
}

EditKind parse_edit_kind(std::string_view name) {
    return parse_enum(name,
                      std::array{EditKind::Add, EditKind::Remove, EditKind::Rephrase,
                                 EditKind::Simplify, EditKind::Keep},
                      "edit kind");
}

ParseQuality parse_parse_quality(std::string_view name) {
    return parse_enum(name,
                      std::array{ParseQuality::Parsed, ParseQuality::Renormalized,
                                 ParseQuality::Unparsed, ParseQuality::Synthesized},
                      "parse quality");
}

StopReason parse_stop_reason(std::string_view name) {
    return parse_enum(
        name,
        std::array{StopReason::EvaluatorStop, StopReason::MaxIterations, StopReason::KeepOnly},
        "stop reason");
}

void SessionConfig::validate() const {
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (setting == Setting::Control && (!topic_query || topic_query->empty())) {
        throw ConfigError("the control setting requires a topic query");
    }
    if (decoding.temperature < 0.0) throw ConfigError("temperature must be >= 0");
    if (decoding.max_output_tokens < 1) throw ConfigError("max_output_tokens must be >= 1");
    if (stop_marker.empty()) throw ConfigError("stop marker must be non-empty");
    if (model_id.empty()) throw ConfigError("model id must be non-empty");
    if (token_budget && *token_budget < 1) throw ConfigError("token budget must be >= 1");
    if (max_triplets < 0) throw ConfigError("max_triplets must be >= 0");
}

Usage& Usage::operator+=(const Usage& o) {
    prompt_tokens += o.prompt_tokens;
    completion_tokens += o.completion_tokens;
    cache_hits += o.cache_hits;
    live_calls += o.live_calls;
    script_calls += o.script_calls;
    return *this;
}

}  // namespace summit
