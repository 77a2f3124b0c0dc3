#include <cctype>

#include "summit/core.hpp"
#include "summit/errors.hpp"
#include "summit/metrics.hpp"

namespace summit {

StopDecision should_stop(const Feedback& feedback, int iteration, const SessionConfig& config) {
    if (feedback.stop_requested) return StopDecision::stop(StopReason::EvaluatorStop);
    if (feedback.edit_ops.size() == 1 && feedback.edit_ops.front().kind == EditKind::Keep) {
        return StopDecision::stop(StopReason::KeepOnly);
    }
    if (iteration >= config.max_iterations) return StopDecision::stop(StopReason::MaxIterations);
    return StopDecision::proceed();
}

Conversation::Conversation(std::string system_prompt) {
    messages_.push_back({MessageRole::System, std::move(system_prompt)});
}

CompletionResponse Conversation::ask(CompletionBackend& backend, std::string user_prompt,
                                     const SessionConfig& config, std::string request_tag) {
    messages_.push_back({MessageRole::User, std::move(user_prompt)});
    CompletionRequest req{config.model_id, messages_, config.decoding.temperature,
                          config.decoding.max_output_tokens, std::move(request_tag)};
    CompletionResponse resp;
    try {
        resp = backend.complete(req);
    } catch (...) {
        messages_.pop_back();
        throw;
    }
    messages_.push_back({MessageRole::Assistant, resp.text});
    usage_.prompt_tokens += resp.usage.prompt_tokens;
    usage_.completion_tokens += resp.usage.completion_tokens;
    switch (resp.served_from) {
        case ServedFrom::Live: ++usage_.live_calls; break;
        case ServedFrom::Cache: ++usage_.cache_hits; break;
        case ServedFrom::Script: ++usage_.script_calls; break;
    }
    return resp;
}

Summary step_refine(Conversation& summarizer, const Summary& previous, const Feedback& feedback,
                    const PromptRegistry& prompts, CompletionBackend& backend,
                    const SessionConfig& config, const std::string& request_tag) {
    RenderedPrompt prompt =
        render(prompts, Role::Summarizer, config.setting, Stage::Refine,
               SlotMap{{"suggestions", feedback.raw}});
    CompletionResponse resp = summarizer.ask(backend, std::move(prompt.user), config, request_tag);
    return {resp.text, previous.iteration + 1,
            resp.text == previous.text ? SummaryOrigin::Unchanged : SummaryOrigin::Refined};
}

namespace {

Usage operator-(Usage a, const Usage& b) {
    a.prompt_tokens -= b.prompt_tokens;
    a.completion_tokens -= b.completion_tokens;
    a.cache_hits -= b.cache_hits;
    a.live_calls -= b.live_calls;
    a.script_calls -= b.script_calls;
    return a;
}

bool blank(const std::string& s) {
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

class Session {
public:
    Session(const Document& doc, const SessionConfig& config, CompletionBackend& backend,
            const PromptRegistry& prompts, const TripletExtractor* extractor)
        : doc_(doc),
          config_(config),
          backend_(backend),
          prompts_(prompts),
          summarizer_(prompts.system_prompt(Role::Summarizer)),
          evaluator_(prompts.system_prompt(Role::Evaluator)) {
        config_.validate();
        if (blank(doc_.text)) throw ConfigError("document '" + doc_.id + "' has empty text");
        base_slots_["document"] = doc_.text;
        if (config_.setting == Setting::Control) base_slots_["topic"] = *config_.topic_query;
        if (config_.setting == Setting::Faithfulness) {
            if (!extractor) throw ConfigError("the faithfulness setting requires a triplet extractor");
            auto triplets = select_triplets(extractor->extract(doc_.text),
                                            static_cast<std::size_t>(config_.max_triplets));
            base_slots_["triplets"] = render_triplets(triplets);
        }
    }

    SessionTrace run() {
        SessionTrace trace;
        trace.document_id = doc_.id;
        trace.config = config_;

        Summary summary;
        std::string summarizer_prompt = render_user(Role::Summarizer, Stage::Summarize, {});
        {
            Usage before = total();
            auto resp = summarizer_.ask(backend_, summarizer_prompt, config_, tag("summarize", 0));
            check_budget();
            summary = {resp.text, 0, SummaryOrigin::Initial};
            pending_usage_ = total() - before;
        }

        if (static_cast<int>(tokenize(doc_.text).size()) < config_.min_document_tokens) {
            Feedback fb;
            fb.raw = config_.stop_marker;
            fb.stop_requested = true;
            fb.parse_quality = ParseQuality::Synthesized;
            trace.steps.push_back({summary, fb, summarizer_prompt, "", pending_usage_});
            trace.stopped_by = StopReason::EvaluatorStop;
            trace.usage = total();
            return trace;
        }

        for (int iteration = 1;; ++iteration) {
            Usage before = total();
            std::string evaluator_prompt =
                render_user(Role::Evaluator, Stage::Evaluate, {{"summary", summary.text}});
            auto resp =
                evaluator_.ask(backend_, evaluator_prompt, config_, tag("evaluate", iteration));
            check_budget();
            Feedback feedback = parse_feedback(resp.text, config_.stop_marker, config_.strict_parsing);
            Usage step_usage = pending_usage_;
            step_usage += total() - before;
            trace.steps.push_back({summary, feedback, summarizer_prompt, evaluator_prompt, step_usage});

            StopDecision decision = should_stop(feedback, iteration, config_);
            if (decision.should_stop()) {
                trace.stopped_by = *decision.reason;
                break;
            }

            before = total();
            summary = step_refine(summarizer_, summary, feedback, prompts_, backend_, config_,
                                  tag("refine", iteration));
            check_budget();
            summarizer_prompt = std::string(summarizer_.messages()[summarizer_.messages().size() - 2].content);
            pending_usage_ = total() - before;
        }
        trace.usage = total();
        return trace;
    }

private:
    std::string render_user(Role role, Stage stage, SlotMap extra) {
        SlotMap slots = base_slots_;
        for (auto& [k, v] : extra) slots[k] = std::move(v);
        if (stage != Stage::Refine) {
            slots["exemplars"] = render_exemplars(config_.exemplars, role, config_.exemplars.size());
        }
        return render(prompts_, role, config_.setting, stage, slots).user;
    }

    std::string tag(const char* what, int iteration) const {
        return doc_.id + "#" + std::to_string(iteration) + ":" + what;
    }

    Usage total() const {
        Usage u = summarizer_.usage();
        u += evaluator_.usage();
        return u;
    }

    void check_budget() const {
        if (!config_.token_budget) return;
        auto used = total().total_tokens();
        if (used > *config_.token_budget) throw BudgetExceeded(used, *config_.token_budget);
    }

    const Document& doc_;
    SessionConfig config_;
    CompletionBackend& backend_;
    const PromptRegistry& prompts_;
    Conversation summarizer_;
    Conversation evaluator_;
    SlotMap base_slots_;
    Usage pending_usage_;
};

}  // namespace

SessionTrace run_session(const Document& doc, const SessionConfig& config,
                         CompletionBackend& backend, const PromptRegistry& prompts,
                         const TripletExtractor* extractor) {
    return Session(doc, config, backend, prompts, extractor).run();
}

}  // namespace summit
