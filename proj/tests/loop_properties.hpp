#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "summit/core.hpp"
#include "summit/errors.hpp"
#include "summit/knowledge.hpp"
#include "summit/prompting.hpp"
#include "summit/serialization.hpp"
#include "support.hpp"

namespace testsupport {

// Counts calls per role (told apart by the system prompt) before forwarding.
class CountingBackend final : public summit::CompletionBackend {
public:
    explicit CountingBackend(summit::CompletionBackend& inner) : inner_(inner) {}
    summit::CompletionResponse complete(const summit::CompletionRequest& r) override {
        const auto& sys = r.messages.front().content;
        if (sys == summit::PromptRegistry::builtin().system_prompt(summit::Role::Evaluator)) {
            ++evaluator_calls;
        } else {
            ++summarizer_calls;
        }
        return inner_.complete(r);
    }
    int summarizer_calls = 0;
    int evaluator_calls = 0;

private:
    summit::CompletionBackend& inner_;
};

enum class Reply { Stop, StopWithOps, KeepOnly, Ops, KeepAndOps, Prose };

struct EvaluatorTurn {
    Reply kind;
    std::string text;
};

inline EvaluatorTurn random_evaluator_turn(Gen& g) {
    auto scores = [&] {
        std::ostringstream s;
        s << "Scores:";
        int hot = g.uniform(1, 5);
        for (int k = 1; k <= 5; ++k) s << ' ' << k << ':' << (k == hot ? "0.6" : "0.1");
        return s.str();
    };
    auto ops = [&] {
        std::string out;
        int n = g.uniform(1, 3);
        for (int i = 0; i < n; ++i) {
            switch (g.uniform(0, 3)) {
                case 0: out += summit::surface_form(summit::EditOp::add(g.phrase(4))); break;
                case 1: out += summit::surface_form(summit::EditOp::remove(g.phrase(4))); break;
                case 2: out += summit::surface_form(summit::EditOp::rephrase(g.phrase(4))); break;
                default: out += summit::surface_form(summit::EditOp::simplify()); break;
            }
            out += '\n';
        }
        return out;
    };
    Reply kind = static_cast<Reply>(g.uniform(0, 5));
    switch (kind) {
        case Reply::Stop: return {kind, scores() + "\nThe summary is accurate.\nDo nothing. <STOP>"};
        case Reply::StopWithOps: return {kind, scores() + "\n" + ops() + "<STOP>"};
        case Reply::KeepOnly: return {kind, scores() + "\nKeep the summary unchanged."};
        case Reply::Ops: return {kind, scores() + "\nThe summary can improve.\n" + ops()};
        case Reply::KeepAndOps: return {kind, scores() + "\n" + ops() + "Do nothing."};
        case Reply::Prose: return {kind, "The revised summary reads well but could be tighter."};
    }
    return {Reply::Prose, ""};
}

struct ExpectedRun {
    int steps = 0;
    summit::StopReason reason = summit::StopReason::MaxIterations;
};

// Stop precedence evaluated from how the replies were built, not from parsing.
inline ExpectedRun expected_run(const std::vector<EvaluatorTurn>& turns, int max_iterations) {
    for (int i = 0; i < max_iterations; ++i) {
        const Reply k = turns[static_cast<std::size_t>(i)].kind;
        if (k == Reply::Stop || k == Reply::StopWithOps) return {i + 1, summit::StopReason::EvaluatorStop};
        if (k == Reply::KeepOnly) return {i + 1, summit::StopReason::KeepOnly};
        if (i + 1 == max_iterations) return {i + 1, summit::StopReason::MaxIterations};
    }
    return {max_iterations, summit::StopReason::MaxIterations};
}

struct LoopCase {
    summit::Document doc;
    summit::SessionConfig config;
    std::vector<summit::ScriptStep> script;
    std::vector<EvaluatorTurn> turns;
    std::vector<bool> echoes;  // summarizer reply i repeats reply i-1
    bool short_doc = false;
    bool truncated = false;
};

inline LoopCase random_loop_case(Gen& g) {
    LoopCase c;
    c.config.max_iterations = g.uniform(1, 8);
    c.config.setting = static_cast<summit::Setting>(g.uniform(0, 2));
    if (c.config.setting == summit::Setting::Control) c.config.topic_query = g.phrase(3);
    c.short_doc = g.coin(0.1);
    c.doc.id = "case" + std::to_string(g.next() % 100000);
    c.doc.text = c.short_doc ? "Too short to refine." : kLongDoc + " " + g.phrase(12) + ".";
    c.doc.reference_summaries = {g.phrase(8)};

    const int m = c.config.max_iterations;
    std::vector<std::string> summaries;
    for (int i = 0; i < m; ++i) {
        bool echo = i > 0 && g.coin(0.2);
        c.echoes.push_back(echo);
        summaries.push_back(echo ? summaries.back() : g.phrase(10) + ".");
    }
    for (int i = 0; i < m; ++i) c.turns.push_back(random_evaluator_turn(g));
    // Calls alternate summarizer, evaluator, summarizer, ... so positional steps line up.
    for (int i = 0; i < m; ++i) {
        c.script.push_back(step("", summaries[static_cast<std::size_t>(i)]));
        c.script.push_back(step("", c.turns[static_cast<std::size_t>(i)].text));
    }
    if (g.coin(0.08)) {
        c.truncated = true;
        c.script.resize(static_cast<std::size_t>(g.uniform(0, static_cast<int>(c.script.size()) - 1)));
    }
    return c;
}

inline std::string describe(const LoopCase& c) {
    std::ostringstream s;
    s << "doc=" << c.doc.id << " max=" << c.config.max_iterations
      << " setting=" << summit::to_string(c.config.setting) << " short=" << c.short_doc
      << " truncated=" << c.truncated << " script_steps=" << c.script.size();
    return s.str();
}

// Runs one randomized case and returns a failure description, or nothing.
inline std::optional<std::string> check_loop_case(Gen& g) {
    using namespace summit;
    LoopCase c = random_loop_case(g);
    const auto& prompts = PromptRegistry::builtin();
    NaiveExtractor extractor;
    const int m = c.config.max_iterations;
    auto fail = [&](const std::string& what) { return std::optional<std::string>(what + " [" + describe(c) + "]"); };

    auto run = [&](CountingBackend& counter) { return run_session(c.doc, c.config, counter, prompts, &extractor); };

    ScriptedBackend scripted(c.script);
    CountingBackend counter(scripted);
    SessionTrace trace;
    try {
        trace = run(counter);
    } catch (const ScriptExhausted&) {
        if (counter.summarizer_calls > m || counter.evaluator_calls > m) return fail("call bound exceeded");
        if (!c.truncated) return fail("script exhausted on a complete script");
        return std::nullopt;
    }
    if (counter.summarizer_calls > m || counter.evaluator_calls > m) return fail("call bound exceeded");

    const auto n = static_cast<int>(trace.steps.size());
    if (n < 1 || n > m) return fail("step count out of range: " + std::to_string(n));
    for (int k = 0; k < n; ++k) {
        const auto& s = trace.steps[static_cast<std::size_t>(k)];
        if (s.summary.iteration != k) return fail("iteration index mismatch at step " + std::to_string(k));
        if ((s.summary.iteration == 0) != (s.summary.origin == SummaryOrigin::Initial)) {
            return fail("origin/iteration mismatch at step " + std::to_string(k));
        }
        if (k > 0) {
            bool unchanged = s.summary.origin == SummaryOrigin::Unchanged;
            if (unchanged != c.echoes[static_cast<std::size_t>(k)]) return fail("unchanged origin mismatch");
            const auto& prev = trace.steps[static_cast<std::size_t>(k - 1)];
            if (s.summarizer_prompt.find(prev.feedback.raw) == std::string::npos) {
                return fail("refine prompt does not embed the previous feedback");
            }
        }
        double sum = 0;
        for (double p : s.feedback.score_distribution) sum += p;
        if (std::abs(sum - 1.0) > 1e-6) return fail("distribution does not sum to 1");
        if (s.feedback.expected_score < 1.0 || s.feedback.expected_score > 5.0) return fail("expected score out of range");
    }
    const auto& last = trace.steps.back().feedback;
    if (last.stop_requested != (trace.stopped_by == StopReason::EvaluatorStop)) {
        return fail("final stop flag disagrees with stopped_by");
    }
    if (trace.stopped_by == StopReason::EvaluatorStop && last.raw.find(c.config.stop_marker) == std::string::npos) {
        return fail("evaluator stop without marker");
    }

    if (c.short_doc) {
        if (n != 1 || trace.stopped_by != StopReason::EvaluatorStop ||
            last.parse_quality != ParseQuality::Synthesized || counter.evaluator_calls != 0) {
            return fail("short document did not short-circuit");
        }
    } else {
        ExpectedRun want = expected_run(c.turns, m);
        if (n != want.steps) return fail("step count " + std::to_string(n) + " != expected " + std::to_string(want.steps));
        if (trace.stopped_by != want.reason) {
            return fail(std::string("stopped_by ") + std::string(to_string(trace.stopped_by)) + " != expected " +
                        std::string(to_string(want.reason)));
        }
        if (counter.evaluator_calls != n || counter.summarizer_calls != n) return fail("call counts do not match steps");
        if (c.config.setting == Setting::Faithfulness) {
            const std::string triplet = "(Obiang; joined; Sampdoria in 2010 after";
            if (trace.steps[0].summarizer_prompt.find(triplet) == std::string::npos ||
                trace.steps[0].evaluator_prompt.find(triplet) == std::string::npos) {
                return fail("triplets missing from faithfulness prompts");
            }
        }
    }
    if (trace.usage.script_calls != counter.summarizer_calls + counter.evaluator_calls) {
        return fail("usage does not count every call");
    }

    // Replay determinism.
    ScriptedBackend again(c.script);
    CountingBackend counter2(again);
    SessionTrace second = run(counter2);
    if (trace_to_jsonl(second) != trace_to_jsonl(trace)) return fail("replay produced a different trace");
    return std::nullopt;
}

}  // namespace testsupport
