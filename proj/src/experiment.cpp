#include "summit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "digest.hpp"
#include "summit/backend.hpp"
#include "summit/core.hpp"
#include "summit/errors.hpp"
#include "summit/knowledge.hpp"
#include "summit/prompting.hpp"
#include "summit/serialization.hpp"

#ifndef SUMMIT_VERSION_STRING
#define SUMMIT_VERSION_STRING "0.0.0-unknown"
#endif

namespace summit {

using nlohmann::json;

std::string summit_version() { return SUMMIT_VERSION_STRING; }

BackendMode parse_backend_mode(std::string_view name) {
    if (name == "live") return BackendMode::Live;
    if (name == "scripted") return BackendMode::Scripted;
    if (name == "replay") return BackendMode::Replay;
    throw ConfigError("unknown backend mode '" + std::string(name) + "' (live|scripted|replay)");
}

std::string_view to_string(BackendMode m) {
    switch (m) {
        case BackendMode::Live: return "live";
        case BackendMode::Scripted: return "scripted";
        case BackendMode::Replay: return "replay";
    }
    return "?";
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative()) path = base / path;
    return path.lexically_normal();
}

std::optional<std::filesystem::path> optional_path(const json& j, const char* key,
                                                   const std::filesystem::path& base) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return resolve(base, j[key].get<std::string>());
}

json path_or_null(const std::optional<std::filesystem::path>& p) {
    return p ? json(p->string()) : json(nullptr);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound(path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

}  // namespace

RunManifest RunManifest::from_json(const json& j, const std::filesystem::path& base_dir) {
    if (j.value("format", "") != "summit-manifest" || j.value("version", 0) != 1) {
        throw ConfigError("manifest must declare format summit-manifest, version 1");
    }
    RunManifest m;
    try {
        m.name = j.at("name").get<std::string>();
        if (j.contains("session")) m.config = config_from_json(j["session"]);
        const auto& corpus = j.at("corpus");
        m.corpus_path = resolve(base_dir, corpus.at("path").get<std::string>());
        m.schema = parse_corpus_schema(corpus.value("schema", "generic"));
        const auto& s = corpus.at("sample");
        m.sample.n = s.at("n").get<std::size_t>();
        m.sample.seed = s.value("seed", std::uint64_t{0});
        m.sample.split = parse_split(s.value("split", "test"));
        const auto& b = j.at("backend");
        m.backend = parse_backend_mode(b.at("mode").get<std::string>());
        m.script_path = optional_path(b, "script", base_dir);
        m.cache_path = optional_path(b, "cache", base_dir);
        m.prompts_path = optional_path(j, "prompts", base_dir);
        if (j.contains("exemplars") && !j["exemplars"].is_null()) {
            m.exemplars_path = resolve(base_dir, j["exemplars"].at("path").get<std::string>());
            m.num_exemplars = j["exemplars"].value("count", std::size_t{2});
        }
        m.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
        m.workers = j.value("workers", std::size_t{4});
        m.version = j.value("summit_version", "");
        m.peek_ledger = optional_path(j, "peek_ledger", base_dir);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed manifest: ") + e.what());
    }
    m.validate();
    return m;
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("manifest " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(j, std::filesystem::absolute(path).parent_path());
}

json RunManifest::to_json() const {
    json exemplars = exemplars_path
                         ? json{{"path", exemplars_path->string()}, {"count", num_exemplars}}
                         : json(nullptr);
    return json{{"format", "summit-manifest"},
                {"version", 1},
                {"name", name},
                {"session", summit::to_json(config)},
                {"corpus",
                 {{"path", corpus_path.string()},
                  {"schema", to_string(schema)},
                  {"sample",
                   {{"n", sample.n}, {"seed", sample.seed}, {"split", to_string(sample.split)}}}}},
                {"backend",
                 {{"mode", to_string(backend)},
                  {"script", path_or_null(script_path)},
                  {"cache", path_or_null(cache_path)}}},
                {"prompts", path_or_null(prompts_path)},
                {"exemplars", std::move(exemplars)},
                {"output_dir", output_dir.string()},
                {"workers", workers},
                {"summit_version", version.empty() ? summit_version() : version},
                {"peek_ledger", path_or_null(peek_ledger)}};
}

void RunManifest::validate() const {
    if (name.empty()) throw ConfigError("manifest needs a run name");
    if (sample.n < 1) throw ConfigError("corpus.sample.n must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (backend == BackendMode::Scripted && !script_path) {
        throw ConfigError("scripted backend mode needs backend.script");
    }
    if (backend == BackendMode::Replay && !cache_path) {
        throw ConfigError("replay mode needs backend.cache");
    }
    SessionConfig probe = config;
    if (probe.setting == Setting::Control && !probe.topic_query) probe.topic_query = "per-document";
    probe.validate();
}

// ---------------------------------------------------------------------------
// Stats

namespace {

json stats_json(const CorpusStats& s) {
    return json{{"mean", s.mean}, {"count", s.count}, {"values", s.values}};
}

CorpusStats stats_from_json(const std::string& name, const json& j) {
    CorpusStats s;
    s.name = name;
    s.mean = j.at("mean").get<double>();
    s.count = j.at("count").get<std::size_t>();
    s.values = j.value("values", std::vector<double>{});
    return s;
}

json stage_json(const StageMetrics& m) {
    json out = json::object();
    auto put = [&](const char* name, const std::optional<CorpusStats>& s) {
        if (s) out[name] = stats_json(*s);
    };
    put("rouge1", m.rouge1);
    put("rouge2", m.rouge2);
    put("rougeL", m.rougeL);
    put("gpt_eval", m.gpt_eval);
    put("faithfulness", m.faithfulness);
    put("topic_similarity", m.topic_similarity);
    return out;
}

StageMetrics stage_from_json(const json& j) {
    StageMetrics m;
    auto get = [&](const char* name, std::optional<CorpusStats>& s) {
        if (j.contains(name)) s = stats_from_json(name, j[name]);
    };
    get("rouge1", m.rouge1);
    get("rouge2", m.rouge2);
    get("rougeL", m.rougeL);
    get("gpt_eval", m.gpt_eval);
    get("faithfulness", m.faithfulness);
    get("topic_similarity", m.topic_similarity);
    return m;
}

}  // namespace

json RunStats::to_json() const {
    json fails = json::array();
    for (const auto& f : failures) {
        fails.push_back({{"document_id", f.document_id}, {"kind", f.kind}, {"message", f.message}});
    }
    return json{{"format", "summit-stats"},
                {"version", 1},
                {"run", run},
                {"documents", documents},
                {"completed", completed},
                {"failed", failures.size()},
                {"failures", std::move(fails)},
                {"mean_iterations", mean_iterations},
                {"stopped_by", stopped_by},
                {"metrics", {{"init", stage_json(init)}, {"final", stage_json(final)}}},
                {"prompt_fingerprint", prompt_fingerprint},
                {"split", split},
                {"acknowledged_peek", acknowledged_peek}};
}

RunStats RunStats::from_json(const json& j) {
    if (j.value("format", "") != "summit-stats" || j.value("version", 0) != 1) {
        throw ConfigError("not a summit-stats v1 document");
    }
    RunStats s;
    try {
        s.run = j.at("run").get<std::string>();
        s.documents = j.value("documents", std::size_t{0});
        s.completed = j.value("completed", std::size_t{0});
        if (j.contains("failures")) {
            for (const auto& f : j["failures"]) {
                s.failures.push_back({f.value("document_id", ""), f.value("kind", ""),
                                      f.value("message", "")});
            }
        }
        s.mean_iterations = j.value("mean_iterations", 0.0);
        if (j.contains("stopped_by")) {
            s.stopped_by = j["stopped_by"].get<std::map<std::string, std::size_t>>();
        }
        s.init = stage_from_json(j.at("metrics").value("init", json::object()));
        s.final = stage_from_json(j.at("metrics").value("final", json::object()));
        s.prompt_fingerprint = j.value("prompt_fingerprint", "");
        s.split = j.value("split", "");
        s.acknowledged_peek = j.value("acknowledged_peek", false);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed stats: ") + e.what());
    }
    return s;
}

// ---------------------------------------------------------------------------
// Running

namespace {

struct Job {
    Document doc;
    SessionConfig config;
};

std::vector<Job> expand_jobs(const std::vector<DatasetRecord>& records, const SessionConfig& base,
                             std::vector<DocumentFailure>& failures) {
    std::vector<Job> jobs;
    for (const auto& r : records) {
        if (base.setting != Setting::Control) {
            jobs.push_back({r.to_document(), base});
            continue;
        }
        if (r.topics.empty()) {
            failures.push_back({r.id, "config", "control setting needs record topics"});
            continue;
        }
        // One session per topic, scored against that topic's reference.
        for (std::size_t k = 0; k < r.topics.size(); ++k) {
            Job job{r.to_document(), base};
            job.doc.id = r.id + "/topic" + std::to_string(k);
            job.doc.topics = {r.topics[k]};
            if (r.topics.size() == r.summaries.size()) job.doc.reference_summaries = {r.summaries[k]};
            job.config.topic_query = r.topics[k];
            jobs.push_back(std::move(job));
        }
    }
    return jobs;
}

std::vector<Exemplar> pick_exemplars(const std::vector<Exemplar>& all, std::size_t per_role) {
    std::vector<Exemplar> out;
    std::size_t summarizer = 0, evaluator = 0;
    for (const auto& ex : all) {
        std::size_t& n = ex.explanation ? evaluator : summarizer;
        if (n < per_role) {
            out.push_back(ex);
            ++n;
        }
    }
    return out;
}

std::string failure_kind(const std::exception& e) {
    if (dynamic_cast<const BackendError*>(&e)) return "backend";
    if (dynamic_cast<const BudgetExceeded*>(&e)) return "budget";
    if (dynamic_cast<const ParseError*>(&e)) return "parse";
    if (dynamic_cast<const RemoteUnavailable*>(&e)) return "remote";
    if (dynamic_cast<const ConfigError*>(&e)) return "config";
    return "error";
}

std::string trace_file_name(std::size_t index, const std::string& id) {
    std::string safe;
    for (char c : id) {
        bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        safe.push_back(ok ? c : '_');
    }
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%05zu_", index);
    return prefix + safe + ".jsonl";
}

// Refuses a test-split run whose prompts differ from those recorded when that
// test sample was first drawn.
void check_peek_ledger(const RunManifest& m, const std::string& fingerprint, bool acknowledge) {
    if (m.sample.split != Split::Test) return;
    auto ledger_path = m.peek_ledger ? *m.peek_ledger
                                     : std::filesystem::path(m.corpus_path.string() + ".peek.json");
    json ledger = json::object();
    if (std::filesystem::exists(ledger_path)) {
        ledger = json::parse(read_file(ledger_path), nullptr, false);
        if (!ledger.is_object()) throw ConfigError("corrupt peek ledger " + ledger_path.string());
    }
    std::string key = "seed=" + std::to_string(m.sample.seed) + ",n=" + std::to_string(m.sample.n);
    if (ledger.contains(key)) {
        if (ledger[key].get<std::string>() != fingerprint && !acknowledge) {
            throw ConfigError(
                "prompts changed since this test sample was first evaluated (" +
                ledger_path.string() +
                "); select prompts on the dev split or pass --acknowledge-peek");
        }
        return;
    }
    ledger[key] = fingerprint;
    write_file(ledger_path, ledger.dump(2) + "\n");
}

std::optional<CorpusStats> maybe_aggregate(std::vector<double> values, const char* name) {
    if (values.empty()) return std::nullopt;
    return aggregate(std::move(values), name);
}

}  // namespace

RunOutcome run_experiment(const RunManifest& manifest, const RunOptions& options) {
    manifest.validate();
    RunManifest effective = manifest;
    if (options.force_mode) effective.backend = *options.force_mode;
    if (options.output_dir) effective.output_dir = *options.output_dir;
    if (effective.version.empty()) effective.version = summit_version();
    effective.validate();
    const OperatorSettings& ops = options.operator_settings;

    // Everything that can fail on configuration happens before any backend call.
    LoadResult corpus = load_corpus(effective.corpus_path, effective.schema, /*strict=*/false);
    std::vector<DatasetRecord> records = sample(corpus.records, effective.sample);
    PromptRegistry prompts = effective.prompts_path ? PromptRegistry::load(*effective.prompts_path)
                                                    : PromptRegistry::builtin();
    SessionConfig base = effective.config;
    if (effective.exemplars_path) {
        base.exemplars = pick_exemplars(load_exemplars(*effective.exemplars_path),
                                        effective.num_exemplars);
    }
    std::string fingerprint = prompts.fingerprint();
    if (!base.exemplars.empty()) {
        std::string blob = fingerprint;
        for (const auto& ex : base.exemplars) {
            blob += '\0' + ex.document + '\0' + ex.summary + '\0' + ex.explanation.value_or("");
        }
        fingerprint = detail::sha256_hex(blob);
    }
    check_peek_ledger(effective, fingerprint, options.acknowledge_peek);

    std::optional<ScriptBook> scripts;
    if (effective.backend == BackendMode::Scripted) scripts = ScriptBook::load(*effective.script_path);
    std::shared_ptr<ResponseCache> cache;
    if (effective.cache_path) cache = std::make_shared<ResponseCache>(*effective.cache_path);
    std::shared_ptr<CompletionBackend> shared_backend;
    if (effective.backend == BackendMode::Live) {
        LiveConfig live{ops.base_url, ops.api_key, std::chrono::seconds(ops.timeout_seconds),
                        RetryPolicy{ops.max_attempts}};
        std::shared_ptr<CompletionBackend> b = throttle(std::make_shared<LiveBackend>(live),
                                                        ops.requests_per_minute);
        shared_backend = cache ? std::make_shared<CachedBackend>(cache, b) : b;
    } else if (effective.backend == BackendMode::Replay) {
        shared_backend = std::make_shared<CachedBackend>(cache, nullptr);
    }

    std::shared_ptr<const TripletExtractor> extractor;
    if (base.setting == Setting::Faithfulness) {
        auto naive = std::make_shared<NaiveExtractor>();
        if (!ops.knowledge_endpoint.empty()) {
            extractor = std::make_shared<FallbackExtractor>(
                std::make_shared<RemoteExtractor>(ops.knowledge_endpoint), naive);
        } else {
            extractor = naive;
        }
    }
    std::optional<FaithfulnessScorer> scorer;
    if (!ops.faithfulness_endpoint.empty()) scorer.emplace(ops.faithfulness_endpoint, nullptr);

    std::vector<DocumentFailure> failures;
    std::vector<Job> jobs = expand_jobs(records, base, failures);

    struct Result {
        std::optional<SessionTrace> trace;
        std::optional<DocumentFailure> failure;
        std::optional<double> faith_init, faith_final;
    };
    std::vector<Result> results(jobs.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job& job = jobs[i];
            try {
                std::shared_ptr<CompletionBackend> backend = shared_backend;
                if (!backend) {
                    std::shared_ptr<CompletionBackend> script = scripts->for_document(job.doc.id);
                    backend = cache ? std::make_shared<CachedBackend>(cache, script) : script;
                }
                SessionTrace trace =
                    run_session(job.doc, job.config, *backend, prompts, extractor.get());
                if (scorer) {
                    results[i].faith_init = scorer->score(job.doc.text, trace.initial_summary().text);
                    results[i].faith_final = scorer->score(job.doc.text, trace.final_summary().text);
                }
                results[i].trace = std::move(trace);
            } catch (const std::exception& e) {
                results[i].trace.reset();
                results[i].failure = DocumentFailure{job.doc.id, failure_kind(e), e.what()};
            }
        }
    };
    std::size_t n_workers = std::min(effective.workers, std::max<std::size_t>(jobs.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // Single writer from here on; everything is in job order.
    RunOutcome outcome;
    outcome.output_dir = effective.output_dir;
    std::filesystem::create_directories(effective.output_dir / "traces");
    RunStats& stats = outcome.stats;
    stats.run = effective.name;
    stats.documents = jobs.size() + failures.size();
    stats.prompt_fingerprint = fingerprint;
    stats.split = std::string(to_string(effective.sample.split));
    stats.acknowledged_peek = options.acknowledge_peek;
    for (const char* reason : {"evaluator_stop", "keep_only", "max_iterations"}) {
        stats.stopped_by[reason] = 0;
    }

    struct Columns {
        std::vector<double> r1, r2, rl, gpt, faith, topic;
    } init_cols, final_cols;
    double iterations = 0.0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        Result& r = results[i];
        if (r.failure) {
            failures.push_back(*r.failure);
            continue;
        }
        const SessionTrace& trace = *r.trace;
        write_trace(effective.output_dir / "traces" / trace_file_name(i, trace.document_id), trace);
        outcome.usage += trace.usage;
        ++stats.completed;
        iterations += static_cast<double>(trace.steps.size());
        ++stats.stopped_by[std::string(to_string(trace.stopped_by))];

        const Job& job = jobs[i];
        auto score = [&](Columns& cols, const TraceStep& step, std::optional<double> faith) {
            if (!job.doc.reference_summaries.empty()) {
                RougeTriple t = rouge_all(step.summary.text, job.doc.reference_summaries);
                cols.r1.push_back(t.rouge1.f1);
                cols.r2.push_back(t.rouge2.f1);
                cols.rl.push_back(t.rougeL.f1);
            }
            if (step.feedback.parse_quality != ParseQuality::Synthesized) {
                cols.gpt.push_back(step.feedback.expected_score);
            }
            if (faith) cols.faith.push_back(*faith);
            if (job.config.topic_query) {
                cols.topic.push_back(topic_similarity(*job.config.topic_query, step.summary.text));
            }
        };
        score(init_cols, trace.steps.front(), r.faith_init);
        score(final_cols, trace.steps.back(), r.faith_final);
    }
    stats.failures = failures;
    stats.mean_iterations = stats.completed ? iterations / static_cast<double>(stats.completed) : 0.0;
    auto fill = [](StageMetrics& m, Columns& c) {
        m.rouge1 = maybe_aggregate(std::move(c.r1), "rouge1");
        m.rouge2 = maybe_aggregate(std::move(c.r2), "rouge2");
        m.rougeL = maybe_aggregate(std::move(c.rl), "rougeL");
        m.gpt_eval = maybe_aggregate(std::move(c.gpt), "gpt_eval");
        m.faithfulness = maybe_aggregate(std::move(c.faith), "faithfulness");
        m.topic_similarity = maybe_aggregate(std::move(c.topic), "topic_similarity");
    };
    fill(stats.init, init_cols);
    fill(stats.final, final_cols);

    write_file(effective.output_dir / "manifest.json", effective.to_json().dump(2) + "\n");
    write_file(effective.output_dir / "stats.json", stats.to_json().dump(2) + "\n");
    write_file(effective.output_dir / "usage.json",
               json{{"format", "summit-usage"}, {"version", 1}, {"usage", to_json(outcome.usage)}}
                       .dump(2) +
                   "\n");
    std::string fail_lines;
    for (const auto& f : stats.failures) {
        fail_lines += json{{"document_id", f.document_id}, {"kind", f.kind}, {"message", f.message}}
                          .dump() +
                      "\n";
    }
    write_file(effective.output_dir / "failures.jsonl", fail_lines);
    return outcome;
}

CallEstimate estimate_calls(const RunManifest& manifest) {
    LoadResult corpus = load_corpus(manifest.corpus_path, manifest.schema, false);
    std::vector<DatasetRecord> records = sample(corpus.records, manifest.sample);
    std::size_t sessions = 0;
    for (const auto& r : records) {
        sessions += manifest.config.setting == Setting::Control ? r.topics.size() : 1;
    }
    CallEstimate e;
    e.documents = sessions;
    const auto iters = static_cast<std::size_t>(manifest.config.max_iterations);
    e.max_calls = sessions * 2 * iters;
    e.expected_calls = sessions * 2 * std::min<std::size_t>(4, iters);
    if (!records.empty()) e.mean_document_words = length_stats(records).mean_document_words;
    return e;
}

// ---------------------------------------------------------------------------
// Reporting

namespace {

constexpr const char* kMissing = "\xE2\x80\x94";  // em dash

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::size_t display_width(const std::string& s) {
    std::size_t w = 0;
    for (unsigned char c : s) w += (c & 0xC0) != 0x80;
    return w;
}

}  // namespace

std::string report(const std::vector<std::filesystem::path>& run_dirs, ReportStage stage,
                   ReportFormat format) {
    struct Run {
        std::string name;
        RunStats stats;
    };
    std::vector<Run> runs;
    for (const auto& dir : run_dirs) {
        auto stats_path = dir / "stats.json";
        if (!std::filesystem::exists(stats_path) || !std::filesystem::exists(dir / "manifest.json")) {
            throw MissingStats(dir.string());
        }
        json j = json::parse(read_file(stats_path), nullptr, false);
        if (j.is_discarded()) throw MissingStats(dir.string());
        RunStats s = RunStats::from_json(j);
        runs.push_back({s.run, std::move(s)});
    }
    std::stable_sort(runs.begin(), runs.end(),
                     [](const Run& a, const Run& b) { return a.name < b.name; });

    bool any_faith = false, any_topic = false;
    for (const auto& r : runs) {
        any_faith |= r.stats.init.faithfulness || r.stats.final.faithfulness;
        any_topic |= r.stats.init.topic_similarity || r.stats.final.topic_similarity;
    }

    std::vector<std::string> header{"Run", "R1", "R2", "RL", "GPT-Eval"};
    if (any_faith) header.push_back("Faithfulness (mean scorer output)");
    if (any_topic) header.push_back("TopicSim");
    std::vector<std::vector<std::string>> rows;
    auto add_row = [&](const std::string& label, const StageMetrics& m) {
        auto pct = [](const std::optional<CorpusStats>& s) {
            return s ? fixed2(s->mean * 100.0) : std::string(kMissing);
        };
        auto raw = [](const std::optional<CorpusStats>& s) {
            return s ? fixed2(s->mean) : std::string(kMissing);
        };
        std::vector<std::string> row{label, pct(m.rouge1), pct(m.rouge2), pct(m.rougeL),
                                     raw(m.gpt_eval)};
        if (any_faith) row.push_back(pct(m.faithfulness));
        if (any_topic) row.push_back(raw(m.topic_similarity));
        rows.push_back(std::move(row));
    };
    for (const auto& r : runs) {
        if (stage == ReportStage::Init) add_row(r.name, r.stats.init);
        if (stage == ReportStage::Final) add_row(r.name, r.stats.final);
        if (stage == ReportStage::Both) {
            add_row(r.name + "-Init", r.stats.init);
            add_row(r.name + "-Final", r.stats.final);
        }
    }

    std::string out;
    if (format == ReportFormat::Csv) {
        auto csv_cell = [](const std::string& s) {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string q = "\"";
            for (char c : s) {
                if (c == '"') q += '"';
                q += c;
            }
            return q + "\"";
        };
        rows.insert(rows.begin(), header);
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out += ',';
                out += csv_cell(row[c]);
            }
            out += '\n';
        }
        return out;
    }
    std::vector<std::size_t> widths(header.size(), 0);
    rows.insert(rows.begin(), header);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], display_width(row[c]));
        }
    }
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::string pad(widths[c] - display_width(row[c]), ' ');
            // Label column left-aligned, numbers right-aligned.
            line += c == 0 ? row[c] + pad : pad + row[c];
            if (c + 1 < row.size()) line += "  ";
        }
        out += line + '\n';
    }
    return out;
}

}  // namespace summit
