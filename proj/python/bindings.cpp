#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "summit/backend.hpp"
#include "summit/core.hpp"
#include "summit/corpus.hpp"
#include "summit/errors.hpp"
#include "summit/experiment.hpp"
#include "summit/knowledge.hpp"
#include "summit/metrics.hpp"
#include "summit/prompting.hpp"
#include "summit/serialization.hpp"

namespace py = pybind11;
using namespace summit;

namespace {

py::tuple score_tuple(const RougeScore& s) { return py::make_tuple(s.precision, s.recall, s.f1); }

std::vector<std::pair<std::string, std::optional<std::string>>> ops_out(const std::vector<EditOp>& ops) {
    std::vector<std::pair<std::string, std::optional<std::string>>> out;
    for (const auto& op : ops) out.emplace_back(std::string(to_string(op.kind)), op.target);
    return out;
}

std::string feedback_json(const Feedback& f) {
    nlohmann::json ops = nlohmann::json::array();
    for (const auto& op : f.edit_ops) ops.push_back(to_json(op));
    return nlohmann::json{{"raw", f.raw},
                          {"score_distribution", f.score_distribution},
                          {"expected_score", f.expected_score},
                          {"edit_ops", ops},
                          {"stop_requested", f.stop_requested},
                          {"parse_quality", to_string(f.parse_quality)}}
        .dump();
}

std::string session_jsonl(const std::string& document, const std::string& script_json,
                          const std::string& config_json, const std::string& doc_id) {
    auto config = config_from_json(nlohmann::json::parse(config_json));
    auto backend = ScriptBook::parse(script_json).for_document(doc_id);
    NaiveExtractor extractor;
    py::gil_scoped_release release;
    auto trace = run_session({doc_id, document, {}, {}}, config, *backend, PromptRegistry::builtin(), &extractor);
    return trace_to_jsonl(trace);
}

std::string experiment_stats(const std::string& manifest, std::optional<std::string> output_dir, bool replay) {
    RunOptions opt;
    if (output_dir) opt.output_dir = *output_dir;
    if (replay) opt.force_mode = BackendMode::Replay;
    auto m = RunManifest::load(manifest);
    py::gil_scoped_release release;
    return run_experiment(m, opt).stats.to_json().dump();
}

}  // namespace

PYBIND11_MODULE(_summit, m) {
    m.doc() = "Native core of the summit package.";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto config = py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<FileNotFound>(m, "FileNotFound", config.ptr());
    py::register_exception<BackendError>(m, "BackendError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<EmptyInput>(m, "EmptyInput", base.ptr());
    py::register_exception<DegenerateDistribution>(m, "DegenerateDistribution", base.ptr());

    m.def("version", &summit_version);
    m.def("tokenize", &tokenize, py::arg("text"));
    m.def(
        "rouge_n",
        [](const std::string& c, const std::string& r, int n) { return score_tuple(rouge_n(c, r, n)); },
        py::arg("candidate"), py::arg("reference"), py::arg("n"));
    m.def(
        "rouge_l", [](const std::string& c, const std::string& r) { return score_tuple(rouge_l(c, r)); },
        py::arg("candidate"), py::arg("reference"));
    m.def("topic_similarity", &topic_similarity, py::arg("query"), py::arg("summary"));
    m.def(
        "expected_score", [](const std::map<int, double>& d) { return expected_score(d).value; },
        py::arg("distribution"));
    m.def(
        "parse_edit_ops", [](const std::string& raw) { return ops_out(parse_edit_ops(raw)); }, py::arg("raw"));
    m.def(
        "surface_form",
        [](const std::string& kind, std::optional<std::string> target) {
            return surface_form(EditOp{parse_edit_kind(kind), std::move(target)});
        },
        py::arg("kind"), py::arg("target") = py::none());
    m.def(
        "_parse_feedback",
        [](const std::string& raw, const std::string& marker, bool strict) {
            return feedback_json(parse_feedback(raw, marker, strict));
        },
        py::arg("raw"), py::arg("stop_marker"), py::arg("strict"));
    m.def(
        "word_count", [](const std::string& t) { return word_count(t); }, py::arg("text"));
    m.def("_run_session", &session_jsonl, py::arg("document"), py::arg("script_json"), py::arg("config_json"),
          py::arg("doc_id"));
    m.def("_run_experiment", &experiment_stats, py::arg("manifest"), py::arg("output_dir"), py::arg("replay"));
}
