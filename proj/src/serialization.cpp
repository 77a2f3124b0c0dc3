#include "summit/serialization.hpp"

#include <fstream>

#include "summit/errors.hpp"

namespace summit {

using nlohmann::json;

json to_json(const SessionConfig& c) {
    json exemplars = json::array();
    for (const auto& ex : c.exemplars) {
        json e{{"document", ex.document}, {"summary", ex.summary}};
        if (ex.explanation) e["explanation"] = *ex.explanation;
        exemplars.push_back(std::move(e));
    }
    return json{{"max_iterations", c.max_iterations},
                {"setting", to_string(c.setting)},
                {"topic_query", c.topic_query ? json(*c.topic_query) : json(nullptr)},
                {"exemplars", std::move(exemplars)},
                {"temperature", c.decoding.temperature},
                {"max_output_tokens", c.decoding.max_output_tokens},
                {"model_id", c.model_id},
                {"stop_marker", c.stop_marker},
                {"strict_parsing", c.strict_parsing},
                {"min_document_tokens", c.min_document_tokens},
                {"token_budget", c.token_budget ? json(*c.token_budget) : json(nullptr)},
                {"max_triplets", c.max_triplets}};
}

SessionConfig config_from_json(const json& j) {
    SessionConfig c;
    try {
        c.max_iterations = j.value("max_iterations", c.max_iterations);
        if (j.contains("setting")) c.setting = parse_setting(j["setting"].get<std::string>());
        if (j.contains("topic_query") && !j["topic_query"].is_null()) {
            c.topic_query = j["topic_query"].get<std::string>();
        }
        if (j.contains("exemplars")) {
            for (const auto& e : j["exemplars"]) {
                Exemplar ex{e.at("document").get<std::string>(), e.at("summary").get<std::string>(),
                            std::nullopt};
                if (e.contains("explanation") && !e["explanation"].is_null()) {
                    ex.explanation = e["explanation"].get<std::string>();
                }
                c.exemplars.push_back(std::move(ex));
            }
        }
        c.decoding.temperature = j.value("temperature", c.decoding.temperature);
        c.decoding.max_output_tokens = j.value("max_output_tokens", c.decoding.max_output_tokens);
        c.model_id = j.value("model_id", c.model_id);
        c.stop_marker = j.value("stop_marker", c.stop_marker);
        c.strict_parsing = j.value("strict_parsing", c.strict_parsing);
        c.min_document_tokens = j.value("min_document_tokens", c.min_document_tokens);
        if (j.contains("token_budget") && !j["token_budget"].is_null()) {
            c.token_budget = j["token_budget"].get<std::int64_t>();
        }
        c.max_triplets = j.value("max_triplets", c.max_triplets);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad session config: ") + e.what());
    }
    return c;
}

json to_json(const EditOp& op) {
    return json{{"kind", to_string(op.kind)},
                {"target", op.target ? json(*op.target) : json(nullptr)}};
}

json to_json(const Usage& u) {
    return json{{"prompt_tokens", u.prompt_tokens},
                {"completion_tokens", u.completion_tokens},
                {"cache_hits", u.cache_hits},
                {"live_calls", u.live_calls},
                {"script_calls", u.script_calls}};
}

namespace {

Usage usage_from_json(const json& j) {
    Usage u;
    u.prompt_tokens = j.value("prompt_tokens", std::int64_t{0});
    u.completion_tokens = j.value("completion_tokens", std::int64_t{0});
    u.cache_hits = j.value("cache_hits", std::int64_t{0});
    u.live_calls = j.value("live_calls", std::int64_t{0});
    u.script_calls = j.value("script_calls", std::int64_t{0});
    return u;
}

}  // namespace

std::string trace_to_jsonl(const SessionTrace& trace) {
    std::string out = json{{"format", "summit-trace"},
                           {"version", 1},
                           {"document_id", trace.document_id},
                           {"config", to_json(trace.config)},
                           {"stopped_by", to_string(trace.stopped_by)},
                           {"usage", to_json(trace.usage)}}
                          .dump() +
                      "\n";
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        const TraceStep& step = trace.steps[k];
        json ops = json::array();
        for (const auto& op : step.feedback.edit_ops) ops.push_back(to_json(op));
        json dist = json::object();
        for (int s = 1; s <= 5; ++s) dist[std::to_string(s)] = step.feedback.score_distribution[s - 1];
        bool last = k + 1 == trace.steps.size();
        json rec{{"document_id", trace.document_id},
                 {"iteration", step.summary.iteration},
                 {"summary_text", step.summary.text},
                 {"feedback_raw", step.feedback.raw},
                 {"edit_ops", std::move(ops)},
                 {"expected_score", step.feedback.expected_score},
                 {"stopped_by", last ? json(to_string(trace.stopped_by)) : json(nullptr)},
                 {"usage", to_json(step.usage)},
                 {"origin", to_string(step.summary.origin)},
                 {"score_distribution", std::move(dist)},
                 {"parse_quality", to_string(step.feedback.parse_quality)},
                 {"stop_requested", step.feedback.stop_requested},
                 {"summarizer_prompt", step.summarizer_prompt},
                 {"evaluator_prompt", step.evaluator_prompt}};
        out += rec.dump() + "\n";
    }
    return out;
}

SessionTrace trace_from_jsonl(std::string_view text) {
    SessionTrace trace;
    std::size_t pos = 0;
    bool header = true;
    try {
        while (pos < text.size()) {
            std::size_t nl = text.find('\n', pos);
            if (nl == std::string_view::npos) nl = text.size();
            std::string_view line = text.substr(pos, nl - pos);
            pos = nl + 1;
            if (line.empty()) continue;
            json j = json::parse(line);
            if (header) {
                if (j.value("format", "") != "summit-trace" || j.value("version", 0) != 1) {
                    throw ConfigError("not a summit-trace v1 file");
                }
                trace.document_id = j.at("document_id").get<std::string>();
                trace.config = config_from_json(j.at("config"));
                trace.stopped_by = parse_stop_reason(j.at("stopped_by").get<std::string>());
                trace.usage = usage_from_json(j.at("usage"));
                header = false;
                continue;
            }
            TraceStep step;
            step.summary.text = j.at("summary_text").get<std::string>();
            step.summary.iteration = j.at("iteration").get<int>();
            step.summary.origin = parse_summary_origin(j.at("origin").get<std::string>());
            step.feedback.raw = j.at("feedback_raw").get<std::string>();
            step.feedback.expected_score = j.at("expected_score").get<double>();
            step.feedback.stop_requested = j.at("stop_requested").get<bool>();
            step.feedback.parse_quality =
                parse_parse_quality(j.at("parse_quality").get<std::string>());
            for (int s = 1; s <= 5; ++s) {
                step.feedback.score_distribution[s - 1] =
                    j.at("score_distribution").at(std::to_string(s)).get<double>();
            }
            for (const auto& op : j.at("edit_ops")) {
                EditOp e{parse_edit_kind(op.at("kind").get<std::string>()), std::nullopt};
                if (!op.at("target").is_null()) e.target = op["target"].get<std::string>();
                step.feedback.edit_ops.push_back(std::move(e));
            }
            step.usage = usage_from_json(j.at("usage"));
            step.summarizer_prompt = j.value("summarizer_prompt", "");
            step.evaluator_prompt = j.value("evaluator_prompt", "");
            trace.steps.push_back(std::move(step));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed trace: ") + e.what());
    }
    if (header) throw ConfigError("empty trace");
    return trace;
}

void write_trace(const std::filesystem::path& path, const SessionTrace& trace) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write trace file " + path.string());
    out << trace_to_jsonl(trace);
}

}  // namespace summit
