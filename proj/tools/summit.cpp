#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "summit/backend.hpp"
#include "summit/core.hpp"
#include "summit/errors.hpp"
#include "summit/experiment.hpp"
#include "summit/knowledge.hpp"
#include "summit/prompting.hpp"
#include "summit/serialization.hpp"
#include "summit/settings.hpp"

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kConfig = 2, kBackend = 3, kPartial = 4 };

struct CommonFlags {
    std::string config_path;
    summit::OperatorFlags op;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file (backend.*, knowledge.*, faithfulness.*)");
    cmd->add_option("--base-url", f.op.base_url, "OpenAI-compatible API base URL");
    cmd->add_option("--rpm", f.op.requests_per_minute, "Requests per minute for live calls");
    cmd->add_option("--knowledge-endpoint", f.op.knowledge_endpoint, "OpenIE annotation server URL");
    cmd->add_option("--faithfulness-endpoint", f.op.faithfulness_endpoint,
                    "Faithfulness scorer URL");
}

summit::OperatorSettings operator_settings(const CommonFlags& f) {
    nlohmann::json config = nlohmann::json::object();
    if (!f.config_path.empty()) config = summit::load_config_file(f.config_path);
    return summit::resolve_operator_settings(f.op, config, summit::process_env());
}

std::string read_all(std::istream& in) {
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::shared_ptr<summit::CompletionBackend> live_stack(const summit::OperatorSettings& ops,
                                                      std::shared_ptr<summit::ResponseCache> cache) {
    if (ops.api_key.empty()) {
        throw summit::ConfigError("live backend needs an API key (SUMMIT_API_KEY or backend.api_key)");
    }
    summit::LiveConfig live{ops.base_url, ops.api_key, std::chrono::seconds(ops.timeout_seconds),
                            summit::RetryPolicy{ops.max_attempts}};
    std::shared_ptr<summit::CompletionBackend> b =
        summit::throttle(std::make_shared<summit::LiveBackend>(live), ops.requests_per_minute);
    if (cache) return std::make_shared<summit::CachedBackend>(cache, b);
    return b;
}

// --- summarize -------------------------------------------------------------

struct SummarizeArgs {
    CommonFlags common;
    std::string input = "-";
    std::string doc_id;
    std::string setting = "quality";
    std::optional<std::string> topic;
    std::optional<int> max_iters;
    std::optional<std::string> model;
    std::string trace_out;
    std::string backend = "live";
    std::string script;
    std::string cache;
    std::string exemplars;
    std::size_t num_exemplars = 2;
    bool strict = false;
    std::optional<std::string> prompts;
};

int cmd_summarize(SummarizeArgs& a) {
    a.common.op.model = a.model;
    summit::OperatorSettings ops = operator_settings(a.common);

    summit::Document doc;
    if (a.input == "-") {
        doc.text = read_all(std::cin);
        doc.id = a.doc_id.empty() ? "stdin" : a.doc_id;
    } else {
        std::ifstream in(a.input, std::ios::binary);
        if (!in) throw summit::FileNotFound(a.input);
        doc.text = read_all(in);
        doc.id = a.doc_id.empty() ? std::filesystem::path(a.input).stem().string() : a.doc_id;
    }

    summit::SessionConfig config;
    config.setting = summit::parse_setting(a.setting);
    config.topic_query = a.topic;
    if (a.max_iters) config.max_iterations = *a.max_iters;
    config.model_id = ops.model;
    config.strict_parsing = a.strict;
    if (config.setting == summit::Setting::Control && !config.topic_query) {
        throw summit::ConfigError("--setting control requires --topic");
    }
    if (!a.exemplars.empty()) {
        std::size_t summarizer = 0, evaluator = 0;
        for (auto& ex : summit::load_exemplars(a.exemplars)) {
            std::size_t& n = ex.explanation ? evaluator : summarizer;
            if (n++ < a.num_exemplars) config.exemplars.push_back(std::move(ex));
        }
    }
    config.validate();

    summit::PromptRegistry prompts =
        a.prompts ? summit::PromptRegistry::load(*a.prompts) : summit::PromptRegistry::builtin();

    std::shared_ptr<summit::ResponseCache> cache;
    if (!a.cache.empty()) cache = std::make_shared<summit::ResponseCache>(a.cache);
    std::shared_ptr<summit::CompletionBackend> backend;
    switch (summit::parse_backend_mode(a.backend)) {
        case summit::BackendMode::Live: backend = live_stack(ops, cache); break;
        case summit::BackendMode::Scripted: {
            if (a.script.empty()) throw summit::ConfigError("--backend scripted requires --script");
            std::shared_ptr<summit::CompletionBackend> s =
                summit::ScriptBook::load(a.script).for_document(doc.id);
            backend = cache ? std::make_shared<summit::CachedBackend>(cache, s) : s;
            break;
        }
        case summit::BackendMode::Replay:
            if (!cache) throw summit::ConfigError("--backend replay requires --cache");
            backend = std::make_shared<summit::CachedBackend>(cache, nullptr);
            break;
    }

    std::shared_ptr<const summit::TripletExtractor> extractor;
    if (config.setting == summit::Setting::Faithfulness) {
        auto naive = std::make_shared<summit::NaiveExtractor>();
        extractor = naive;
        if (!ops.knowledge_endpoint.empty()) {
            extractor = std::make_shared<summit::FallbackExtractor>(
                std::make_shared<summit::RemoteExtractor>(ops.knowledge_endpoint), naive);
        }
    }

    summit::SessionTrace trace = summit::run_session(doc, config, *backend, prompts, extractor.get());
    if (!a.trace_out.empty()) summit::write_trace(a.trace_out, trace);
    std::cout << trace.final_summary().text << "\n";
    std::cerr << "iterations: " << trace.steps.size()
              << ", stopped by: " << summit::to_string(trace.stopped_by)
              << ", tokens: " << trace.usage.total_tokens() << "\n";
    return kOk;
}

// --- run-exp / replay / estimate --------------------------------------------

struct RunArgs {
    CommonFlags common;
    std::string manifest;
    std::string output_dir;
    bool yes = false;
    bool acknowledge_peek = false;
};

void print_estimate(const summit::CallEstimate& e, std::ostream& out) {
    out << "sessions:          " << e.documents << "\n"
        << "max calls:         " << e.max_calls << "\n"
        << "expected calls:    " << e.expected_calls << "\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", e.mean_document_words);
    out << "mean doc words:    " << buf << "\n";
}

int finish_run(const summit::RunOutcome& outcome) {
    const auto& s = outcome.stats;
    std::cerr << "run " << s.run << ": " << s.completed << "/" << s.documents
              << " documents completed; output in " << outcome.output_dir.string() << "\n";
    for (const auto& f : s.failures) {
        std::cerr << "  failed " << f.document_id << " [" << f.kind << "]: " << f.message << "\n";
    }
    if (!outcome.has_failures()) return kOk;
    bool all_backend = s.completed == 0;
    for (const auto& f : s.failures) all_backend = all_backend && f.kind == "backend";
    return all_backend ? kBackend : kPartial;
}

int cmd_run_exp(RunArgs& a, bool replay) {
    summit::RunManifest manifest = summit::RunManifest::load(a.manifest);
    summit::RunOptions options;
    options.acknowledge_peek = a.acknowledge_peek;
    if (!a.output_dir.empty()) options.output_dir = a.output_dir;
    if (replay) options.force_mode = summit::BackendMode::Replay;
    options.operator_settings = operator_settings(a.common);
    auto mode = replay ? summit::BackendMode::Replay : manifest.backend;
    if (mode == summit::BackendMode::Live) {
        print_estimate(summit::estimate_calls(manifest), std::cerr);
        if (!a.yes) {
            throw summit::ConfigError("live run not started; re-run with --yes to confirm the spend above");
        }
        if (options.operator_settings.api_key.empty()) {
            throw summit::ConfigError("live backend needs an API key (SUMMIT_API_KEY or backend.api_key)");
        }
    }
    return finish_run(summit::run_experiment(manifest, options));
}

int cmd_estimate(const std::string& manifest_path) {
    print_estimate(summit::estimate_calls(summit::RunManifest::load(manifest_path)), std::cout);
    return kOk;
}

// --- report ----------------------------------------------------------------

int cmd_report(const std::vector<std::string>& dirs, const std::string& stage,
               const std::string& format) {
    summit::ReportStage st = stage == "init"    ? summit::ReportStage::Init
                             : stage == "final" ? summit::ReportStage::Final
                                                : summit::ReportStage::Both;
    summit::ReportFormat fmt = format == "csv" ? summit::ReportFormat::Csv : summit::ReportFormat::Text;
    std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
    std::cout << summit::report(paths, st, fmt);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterative summarization with a summarizer/evaluator loop", "summit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", summit::summit_version());

    SummarizeArgs sum;
    auto* summarize = app.add_subcommand("summarize", "Summarize one document (file or stdin)");
    summarize->add_option("input", sum.input, "Document file, or - for stdin");
    summarize->add_option("--id", sum.doc_id, "Document id (defaults to the file stem)");
    summarize->add_option("--setting", sum.setting, "quality | control | faithfulness")
        ->check(CLI::IsMember({"quality", "control", "faithfulness"}, CLI::ignore_case));
    summarize->add_option("--topic", sum.topic, "Topic query for the control setting");
    summarize->add_option("--max-iters", sum.max_iters, "Maximum refinement iterations")
        ->check(CLI::PositiveNumber);
    summarize->add_option("--model", sum.model, "Model id");
    summarize->add_option("--trace-out", sum.trace_out, "Write the session trace (JSONL) here");
    summarize->add_option("--backend", sum.backend, "live | scripted | replay")
        ->check(CLI::IsMember({"live", "scripted", "replay"}));
    summarize->add_option("--script", sum.script, "Script file for the scripted backend");
    summarize->add_option("--cache", sum.cache, "Response cache file");
    summarize->add_option("--exemplars", sum.exemplars, "Few-shot exemplar JSONL");
    summarize->add_option("--num-exemplars", sum.num_exemplars, "Exemplars per role");
    summarize->add_option("--prompts", sum.prompts, "Prompt manifest overriding the built-ins");
    summarize->add_flag("--strict", sum.strict, "Fail on unparseable evaluator output");
    add_common(summarize, sum.common);

    RunArgs run;
    auto* run_exp = app.add_subcommand("run-exp", "Run an experiment manifest");
    run_exp->add_option("manifest", run.manifest, "Manifest JSON")->required();
    run_exp->add_option("--output-dir", run.output_dir, "Override the manifest's output_dir");
    run_exp->add_flag("--yes", run.yes, "Confirm a live run after the call estimate");
    run_exp->add_flag("--acknowledge-peek", run.acknowledge_peek,
                      "Allow a test-split run with prompts changed since first sampling");
    add_common(run_exp, run.common);

    RunArgs rep;
    auto* replay = app.add_subcommand("replay", "Re-run a manifest from its response cache only");
    replay->add_option("manifest", rep.manifest, "Manifest JSON (a run's own manifest works)")
        ->required();
    replay->add_option("--output-dir", rep.output_dir, "Override the manifest's output_dir");
    replay->add_flag("--acknowledge-peek", rep.acknowledge_peek, "See run-exp");
    add_common(replay, rep.common);

    std::vector<std::string> report_dirs;
    std::string stage = "both", format = "text";
    auto* report = app.add_subcommand("report", "Tabulate metrics from run directories");
    report->add_option("runs", report_dirs, "Run output directories")->required();
    report->add_option("--stage", stage, "init | final | both")
        ->check(CLI::IsMember({"init", "final", "both"}));
    report->add_option("--format", format, "text | csv")->check(CLI::IsMember({"text", "csv"}));

    std::string estimate_manifest;
    auto* estimate = app.add_subcommand("estimate", "Print projected backend calls for a manifest");
    estimate->add_option("manifest", estimate_manifest, "Manifest JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*summarize) return cmd_summarize(sum);
        if (*run_exp) return cmd_run_exp(run, false);
        if (*replay) return cmd_run_exp(rep, true);
        if (*report) return cmd_report(report_dirs, stage, format);
        if (*estimate) return cmd_estimate(estimate_manifest);
    } catch (const summit::ConfigError& e) {
        std::cerr << "summit: configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const summit::BackendError& e) {
        std::cerr << "summit: backend error: " << e.what() << "\n";
        return kBackend;
    } catch (const summit::BudgetExceeded& e) {
        std::cerr << "summit: " << e.what() << "\n";
        return kBackend;
    } catch (const summit::MissingStats& e) {
        std::cerr << "summit: " << e.what() << "\n";
        return kConfig;
    } catch (const summit::SchemaViolation& e) {
        std::cerr << "summit: corpus error: " << e.what() << "\n";
        return kConfig;
    } catch (const summit::SampleTooLarge& e) {
        std::cerr << "summit: corpus error: " << e.what() << "\n";
        return kConfig;
    } catch (const summit::EmptyInput& e) {
        std::cerr << "summit: input error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "summit: error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
