// Acceptance gate. Prints one line per criterion: PASS, FAIL or SKIP.
// Exits nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>

#include "loop_properties.hpp"
#include "summit/corpus.hpp"
#include "summit/errors.hpp"
#include "summit/experiment.hpp"
#include "summit/metrics.hpp"
#include "summit/prompting.hpp"
#include "summit/settings.hpp"
#include "support.hpp"

using namespace summit;
using testsupport::Gen;
using testsupport::TempDir;

namespace {

constexpr int kLoopCases = 1000;
constexpr double kLoopSeconds = 30.0;
constexpr int kRougeCases = 500;
constexpr int kRougeMaxLen = 12;
constexpr double kRougeTol = 1e-9;
constexpr double kRougeSeconds = 10.0;
constexpr int kEditOpFixtureCases = 50;
constexpr int kRoundTrips = 1000;
constexpr int kMetricCases = 2000;
constexpr double kBoundSlack = 1e-12;
constexpr double kXsumDocWords = 430.2;
constexpr double kXsumSummaryWords = 23.3;
constexpr double kLengthTolerance = 0.05;
constexpr std::size_t kLiveDocuments = 50;

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

Outcome pass(std::string d) { return {Verdict::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Verdict::Fail, std::move(d)}; }
Outcome skip(std::string d) { return {Verdict::Skip, std::move(d)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

bool near(double a, double b) { return std::abs(a - b) <= kRougeTol; }

Outcome loop_suite() {
    auto t0 = std::chrono::steady_clock::now();
    Gen g(20240917);
    for (int i = 0; i < kLoopCases; ++i) {
        if (auto f = testsupport::check_loop_case(g)) return fail("case " + std::to_string(i) + ": " + *f);
    }
    // Stop-precedence table over every combination of flags.
    SessionConfig c;
    c.max_iterations = 3;
    for (bool stop : {false, true}) {
        for (bool keep_only : {false, true}) {
            for (int it = 1; it <= 4; ++it) {
                Feedback fb;
                fb.stop_requested = stop;
                fb.raw = stop ? "<STOP>" : "x";
                fb.edit_ops = keep_only ? std::vector<EditOp>{EditOp::keep()} : std::vector<EditOp>{EditOp::add("a")};
                std::optional<StopReason> want;
                if (stop) want = StopReason::EvaluatorStop;
                else if (keep_only) want = StopReason::KeepOnly;
                else if (it >= c.max_iterations) want = StopReason::MaxIterations;
                if (should_stop(fb, it, c).reason != want) return fail("stop precedence table mismatch");
            }
        }
    }
    double s = seconds_since(t0);
    if (s >= kLoopSeconds) return fail(fmt("%.1f s exceeds the time limit", s));
    return pass(std::to_string(kLoopCases) + " cases in " + fmt("%.2f s", s));
}

Outcome rouge_suite() {
    auto t0 = std::chrono::steady_clock::now();
    const std::string cand = "the cat sat on the mat", ref = "the cat was on the mat";
    if (!near(rouge_n(cand, ref, 1).precision, 5.0 / 6) || !near(rouge_n(cand, ref, 1).recall, 5.0 / 6) ||
        !near(rouge_n(cand, ref, 1).f1, 5.0 / 6)) {
        return fail("worked rouge-1 example");
    }
    if (!near(rouge_n(cand, ref, 2).f1, 0.6)) return fail("worked rouge-2 example");
    if (!near(rouge_l(cand, ref).f1, 5.0 / 6)) return fail("worked rouge-l example");

    Gen g(77);
    auto same = [](const RougeScore& a, const testsupport::oracle::PRF& b) {
        return near(a.precision, b.p) && near(a.recall, b.r) && near(a.f1, b.f);
    };
    for (int i = 0; i < kRougeCases; ++i) {
        auto a = g.tokens(kRougeMaxLen, g.uniform(2, 6));
        auto b = g.tokens(kRougeMaxLen, g.uniform(2, 6));
        for (int n : {1, 2}) {
            if (!same(rouge_n(a, b, n), testsupport::oracle::rouge_n(a, b, n))) {
                return fail("rouge-" + std::to_string(n) + " disagrees with oracle at case " + std::to_string(i));
            }
        }
        if (!same(rouge_l(a, b), testsupport::oracle::rouge_l(a, b))) {
            return fail("rouge-l disagrees with oracle at case " + std::to_string(i));
        }
    }
    double s = seconds_since(t0);
    if (s >= kRougeSeconds) return fail(fmt("%.1f s exceeds the time limit", s));
    return pass(std::to_string(kRougeCases) + " random pairs plus worked examples in " + fmt("%.2f s", s));
}

EditOp random_op(Gen& g) {
    switch (g.uniform(0, 4)) {
        case 0: return EditOp::add(g.phrase(6));
        case 1: return EditOp::remove(g.phrase(6));
        case 2: return EditOp::rephrase(g.phrase(6));
        case 3: return EditOp::simplify();
        default: return EditOp::keep();
    }
}

Outcome parser_suite() {
    std::ifstream in(testsupport::fixture("edit_ops_cases.jsonl"));
    if (!in) return fail("fixture file missing");
    std::string line;
    int total = 0, correct = 0;
    std::string first_miss;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        std::vector<EditOp> want;
        for (const auto& e : j.at("expected")) {
            EditOp op{parse_edit_kind(e.at("kind").get<std::string>()), std::nullopt};
            if (!e.at("target").is_null()) op.target = e["target"].get<std::string>();
            want.push_back(op);
        }
        ++total;
        if (parse_edit_ops(j.at("raw").get<std::string>()) == want) ++correct;
        else if (first_miss.empty()) first_miss = j.at("raw").get<std::string>();
    }
    if (total != kEditOpFixtureCases) return fail("fixture has " + std::to_string(total) + " cases");
    if (correct != total) return fail(std::to_string(correct) + "/" + std::to_string(total) + ", first miss: " + first_miss);

    Gen g(4242);
    for (int i = 0; i < kRoundTrips; ++i) {
        EditOp op = random_op(g);
        if (parse_edit_ops(surface_form(op)) != std::vector<EditOp>{op}) {
            return fail("round-trip failed for \"" + surface_form(op) + "\"");
        }
    }
    return pass(std::to_string(total) + "/" + std::to_string(total) + " fixture cases, " +
                std::to_string(kRoundTrips) + " round-trips");
}

Outcome replay_suite() {
    TempDir dir;
    for (const char* f : {"corpus10.jsonl", "script10.json", "manifest10.json"}) {
        std::filesystem::copy_file(testsupport::fixture(f), dir / f);
    }
    auto j = nlohmann::json::parse(testsupport::read_text(dir / "manifest10.json"));
    j["backend"]["cache"] = "cache.jsonl";
    j["output_dir"] = "recorded";
    testsupport::write_text(dir / "manifest10.json", j.dump(2));
    auto recorded = run_experiment(RunManifest::load(dir / "manifest10.json"), {});
    if (recorded.stats.completed != 10) return fail("recording run completed " + std::to_string(recorded.stats.completed));

    auto emitted = RunManifest::load(dir / "recorded" / "manifest.json");
    RunOptions opt;
    opt.force_mode = BackendMode::Replay;
    std::vector<std::string> stats;
    for (const char* out : {"replay1", "replay2"}) {
        opt.output_dir = dir / out;
        auto r = run_experiment(emitted, opt);
        if (r.usage.live_calls != 0 || r.usage.script_calls != 0) return fail("replay made backend calls");
        if (r.has_failures()) return fail("replay had failures");
        stats.push_back(testsupport::read_text(dir / out / "stats.json"));
    }
    if (stats[0].empty() || stats[0] != stats[1]) return fail("replayed stats files differ");
    if (stats[0] != testsupport::read_text(dir / "recorded" / "stats.json")) return fail("replay differs from recording");
    return pass("two replays byte-identical, 0 live calls");
}

Outcome live_smoke() {
    auto key = env("SUMMIT_API_KEY");
    auto corpus = env("SUMMIT_XSUM_CORPUS");
    if (!key || !corpus) return skip("needs SUMMIT_API_KEY and SUMMIT_XSUM_CORPUS");
    TempDir dir;
    nlohmann::json j{{"format", "summit-manifest"},
                     {"version", 1},
                     {"name", "live-smoke"},
                     {"session", {{"setting", "quality"}}},
                     {"corpus", {{"path", *corpus}, {"sample", {{"n", kLiveDocuments}, {"seed", 0}, {"split", "dev"}}}}},
                     {"backend", {{"mode", "live"}, {"cache", (dir / "cache.jsonl").string()}}},
                     {"output_dir", (dir / "out").string()},
                     {"workers", 4}};
    testsupport::write_text(dir / "m.json", j.dump(2));
    RunOptions opt;
    opt.operator_settings = resolve_operator_settings({}, nlohmann::json::object(), process_env());
    auto r = run_experiment(RunManifest::load(dir / "m.json"), opt);
    const auto& s = r.stats;
    if (!s.init.gpt_eval || !s.final.gpt_eval) return fail("no GPT-Eval scores collected");
    double init = s.init.gpt_eval->mean, final = s.final.gpt_eval->mean;
    std::string d = fmt("GPT-Eval %.2f -> %.2f, mean iterations %.2f", init, final, s.mean_iterations);
    int max_it = j["session"].value("max_iterations", SessionConfig{}.max_iterations);
    if (s.mean_iterations < 1.0 || s.mean_iterations > max_it) return fail(d);
    if (!(final > init)) return fail(d);
    return pass(d);
}

Outcome xsum_lengths() {
    auto corpus = env("SUMMIT_XSUM_CORPUS");
    if (!corpus) return skip("needs SUMMIT_XSUM_CORPUS (unverified)");
    auto loaded = load_corpus(*corpus, CorpusSchema::Generic);
    auto stats = length_stats(loaded.records);
    double dd = std::abs(stats.mean_document_words - kXsumDocWords) / kXsumDocWords;
    double ds = std::abs(stats.mean_summary_words - kXsumSummaryWords) / kXsumSummaryWords;
    std::string d = fmt("doc %.1f, summary %.1f words", stats.mean_document_words, stats.mean_summary_words) +
                    " over " + std::to_string(stats.documents) + " records";
    if (dd > kLengthTolerance || ds > kLengthTolerance) return fail(d);
    return pass(d);
}

template <class E, class F>
bool throws(F&& f) {
    try {
        f();
    } catch (const E&) {
        return true;
    } catch (...) {
        return false;
    }
    return false;
}

Outcome metric_invariants() {
    Gen g(99);
    auto in01 = [](const RougeScore& s) {
        for (double v : {s.precision, s.recall, s.f1}) {
            if (!(v >= -kBoundSlack && v <= 1 + kBoundSlack)) return false;
        }
        return true;
    };
    auto swapped = [](const RougeScore& a, const RougeScore& b) {
        return std::abs(a.precision - b.recall) <= kBoundSlack && std::abs(a.recall - b.precision) <= kBoundSlack &&
               std::abs(a.f1 - b.f1) <= kBoundSlack;
    };
    for (int i = 0; i < kMetricCases; ++i) {
        std::string a = g.coin(0.2) ? g.noise(20) : g.phrase(15);
        std::string b = g.coin(0.2) ? g.noise(20) : g.phrase(15);
        for (int n : {1, 2, 3}) {
            auto ab = rouge_n(a, b, n), ba = rouge_n(b, a, n);
            if (!in01(ab) || !swapped(ab, ba)) return fail("rouge-n bound/swap violated at case " + std::to_string(i));
        }
        auto ab = rouge_l(a, b), ba = rouge_l(b, a);
        if (!in01(ab) || !swapped(ab, ba)) return fail("rouge-l bound/swap violated at case " + std::to_string(i));
        double t = topic_similarity(a, b);
        if (!(t >= -kBoundSlack && t <= 1 + kBoundSlack) || std::abs(t - topic_similarity(b, a)) > kBoundSlack) {
            return fail("topic similarity bound/swap violated at case " + std::to_string(i));
        }
        std::map<int, double> dist;
        for (int s = 1; s <= 5; ++s) {
            if (g.coin(0.7)) dist[s] = g.real(0, 1);
        }
        if (dist.empty()) dist[g.uniform(1, 5)] = 1.0;
        double mass = 0;
        for (auto& [k, v] : dist) mass += v;
        if (mass == 0) continue;
        double e = expected_score(dist).value;
        if (!(e >= 1 - kBoundSlack && e <= 5 + kBoundSlack)) return fail("expected_score out of [1,5]");
        Feedback fb = parse_feedback(g.noise(30), "<STOP>");
        if (fb.expected_score < 1 || fb.expected_score > 5) return fail("parsed feedback score out of [1,5]");
    }
    if (!throws<DegenerateDistribution>([] { expected_score(std::map<int, double>{{1, 0.0}, {2, 0.0}}); })) {
        return fail("zero-mass distribution not rejected");
    }
    if (!throws<std::invalid_argument>([] { expected_score(std::map<int, double>{{6, 1.0}}); })) {
        return fail("out-of-range score key not rejected");
    }
    if (!throws<std::invalid_argument>([] { expected_score(std::map<int, double>{{1, -0.5}, {2, 1.5}}); })) {
        return fail("negative probability not rejected");
    }
    if (!throws<std::invalid_argument>([] { rouge_n("a", "a", 0); })) return fail("n = 0 not rejected");
    if (!throws<EmptyInput>([] { rouge_all("a", {}); })) return fail("empty reference list not rejected");
    if (!throws<EmptyInput>([] { aggregate({}, "x"); })) return fail("empty aggregate not rejected");
    if (rouge_n("", "", 1).f1 != 0.0 || rouge_l("", "x").f1 != 0.0 || topic_similarity("", "x") != 0.0) {
        return fail("empty strings do not score zero");
    }
    return pass(std::to_string(kMetricCases) + " random cases, degenerate inputs rejected");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 offline loop suite", loop_suite},
        {"2 rouge oracle", rouge_suite},
        {"3 edit-op parser", parser_suite},
        {"4 replay reproducibility", replay_suite},
        {"5 live directional smoke", live_smoke},
        {"6 xsum corpus lengths", xsum_lengths},
        {"7 metric invariants", metric_invariants},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
        failures += o.verdict == Verdict::Fail;
        std::cout << tag << "  " << name << ": " << o.detail << "\n";
    }
    std::cout << (failures ? "acceptance: FAILED\n" : "acceptance: OK\n");
    return failures ? 1 : 0;
}
