#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "summit/types.hpp"

namespace summit {

nlohmann::json to_json(const SessionConfig& config);
/// Missing keys keep their defaults. Throws ConfigError on bad values.
SessionConfig config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EditOp& op);
nlohmann::json to_json(const Usage& usage);

/// Header line {"format":"summit-trace","version":1,"document_id","config",
/// "stopped_by","usage"} followed by one record per step carrying
/// document_id, iteration, summary_text, feedback_raw, edit_ops,
/// expected_score, stopped_by (null except on the last step) and usage
/// (that step's calls), plus origin, score_distribution, parse_quality,
/// stop_requested, summarizer_prompt and evaluator_prompt.
std::string trace_to_jsonl(const SessionTrace& trace);
SessionTrace trace_from_jsonl(std::string_view text);

void write_trace(const std::filesystem::path& path, const SessionTrace& trace);

}  // namespace summit
