#pragma once

#include <optional>
#include <string>
#include <vector>

#include "summit/backend.hpp"
#include "summit/knowledge.hpp"
#include "summit/prompting.hpp"
#include "summit/types.hpp"

namespace summit {

struct StopDecision {
    std::optional<StopReason> reason;  // empty = continue

    static StopDecision proceed() { return {}; }
    static StopDecision stop(StopReason r) { return {r}; }
    bool should_stop() const { return reason.has_value(); }
    bool operator==(const StopDecision&) const = default;
};

/// Precedence: EvaluatorStop > KeepOnly > MaxIterations. `iteration` is the
/// 1-based count of evaluations so far.
StopDecision should_stop(const Feedback& feedback, int iteration, const SessionConfig& config);

/// One role's chat history: the system prompt followed by alternating
/// user/assistant turns. Also tallies the usage of every call it makes.
class Conversation {
public:
    explicit Conversation(std::string system_prompt);

    /// Appends `user_prompt`, sends the whole history, appends the reply.
    /// On a backend error the user turn is rolled back.
    CompletionResponse ask(CompletionBackend& backend, std::string user_prompt,
                           const SessionConfig& config, std::string request_tag);

    const std::vector<ChatMessage>& messages() const { return messages_; }
    const Usage& usage() const { return usage_; }

private:
    std::vector<ChatMessage> messages_;
    Usage usage_;
};

/// Asks the summarizer to revise `previous` following `feedback.raw`, which is
/// embedded verbatim in the refine prompt. The result is Unchanged when the
/// reply is character-identical to `previous.text`, Refined otherwise.
Summary step_refine(Conversation& summarizer, const Summary& previous, const Feedback& feedback,
                    const PromptRegistry& prompts, CompletionBackend& backend,
                    const SessionConfig& config, const std::string& request_tag = "refine");

/// Runs summarize → (evaluate → refine)* until should_stop fires. Makes at
/// most max_iterations evaluator calls and max_iterations summarizer calls.
/// `extractor` is required for the faithfulness setting; triplets are
/// extracted once per document.
SessionTrace run_session(const Document& doc, const SessionConfig& config,
                         CompletionBackend& backend, const PromptRegistry& prompts,
                         const TripletExtractor* extractor = nullptr);

}  // namespace summit
