#pragma once

#include <compare>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "summit/types.hpp"

namespace summit {

/// Slot name → substituted text.
using SlotMap = std::map<std::string, std::string, std::less<>>;

struct RenderedPrompt {
    std::string system;
    std::string user;
};

/// A template with `{{slot_name}}` markers. Slot names are lowercase
/// identifiers; anything else between braces is kept literally.
class PromptTemplate {
public:
    static PromptTemplate parse(std::string_view text);

    /// Referenced slot names, in order of first appearance.
    const std::vector<std::string>& slots() const { return slots_; }
    bool references(std::string_view slot) const;

    /// Single pass: substituted values are never rescanned for markers.
    /// Throws MissingSlot for the first referenced slot absent from `values`.
    std::string render(const SlotMap& values) const;

    const std::string& source() const { return source_; }

private:
    struct Segment {
        bool is_slot;
        std::string text;
    };
    std::string source_;
    std::vector<Segment> segments_;
    std::vector<std::string> slots_;
};

struct PromptKey {
    Role role;
    Setting setting;
    Stage stage;
    auto operator<=>(const PromptKey&) const = default;
};

/// Every system prompt, user template and per-role format instruction the
/// loop needs. Immutable once constructed.
class PromptRegistry {
public:
    /// Templates compiled into the library from the repository's prompts/ dir.
    static PromptRegistry builtin();

    /// Loads a manifest.json and the template files it names (paths relative
    /// to the manifest). Throws FileNotFound / ConfigError.
    static PromptRegistry load(const std::filesystem::path& manifest);

    /// Shared by load() and builtin(): `read` maps a manifest-relative name to text.
    static PromptRegistry from_manifest(std::string_view manifest_json,
                                        const std::function<std::string(const std::string&)>& read);

    const PromptTemplate& user_template(Role role, Setting setting, Stage stage) const;
    const std::string& system_prompt(Role role) const;
    const std::string& format_instructions(Role role) const;

    /// SHA-256 over every template and prompt, in key order.
    std::string fingerprint() const;

    static const std::vector<std::string>& known_slots();
    /// The nine (role, setting, stage) combinations a registry must define.
    static std::vector<PromptKey> required_keys();

private:
    void validate() const;

    std::map<PromptKey, PromptTemplate> templates_;
    std::map<Role, std::string> system_;
    std::map<Role, std::string> format_;
};

/// Fills `format_instructions` and `exemplars` from registry defaults when the
/// context omits them; every other referenced slot must be supplied.
RenderedPrompt render(const PromptRegistry& registry, Role role, Setting setting, Stage stage,
                      const SlotMap& context);

/// Exemplars with an explanation belong to the evaluator, the rest to the
/// summarizer. Takes the first `limit` of the role's share, in order.
std::string render_exemplars(std::span<const Exemplar> exemplars, Role role,
                             std::size_t limit = 2);

/// JSONL: {"document": ..., "summary": ..., "explanation": optional}.
std::vector<Exemplar> load_exemplars(const std::filesystem::path& path);

/// Recognizes the five suggestion forms case-insensitively, in textual order.
/// Targets run to the next sentence terminator or the next suggestion.
std::vector<EditOp> parse_edit_ops(std::string_view raw);

/// Canonical sentence for an op; parse_edit_ops(surface_form(op)) == {op}.
std::string surface_form(const EditOp& op);

struct ParsedDistribution {
    ScoreDistribution probabilities{};
    bool renormalized = false;
};

/// First score list in `raw`: "1:0.1 2:0.2 ...", comma/semicolon separated,
/// braced, percentages, or a positional list of five numbers "[p1, ..., p5]".
std::optional<ParsedDistribution> parse_score_distribution(std::string_view raw);

/// Lenient by default: an unparseable distribution becomes uniform with
/// ParseQuality::Unparsed. With `strict`, that case throws ParseError.
Feedback parse_feedback(std::string_view raw, std::string_view stop_marker, bool strict = false);

}  // namespace summit
