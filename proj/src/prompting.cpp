#include "summit/prompting.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "digest.hpp"
#include "summit/errors.hpp"

namespace summit {
namespace {

bool is_slot_char(char c) { return (c >= 'a' && c <= 'z') || c == '_' || (c >= '0' && c <= '9'); }

std::string strip_one_trailing_newline(std::string s) {
    if (!s.empty() && s.back() == '\n') s.pop_back();
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound(path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string key_name(const PromptKey& k) {
    return std::string(to_string(k.role)) + "/" + std::string(to_string(k.setting)) + "/" +
           std::string(to_string(k.stage));
}

}  // namespace

PromptTemplate PromptTemplate::parse(std::string_view text) {
    PromptTemplate t;
    t.source_ = std::string(text);
    std::string literal;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text.compare(i, 2, "{{") == 0) {
            std::size_t j = i + 2;
            while (j < text.size() && is_slot_char(text[j])) ++j;
            if (j > i + 2 && text.compare(j, 2, "}}") == 0) {
                if (!literal.empty()) t.segments_.push_back({false, std::move(literal)});
                literal.clear();
                std::string name(text.substr(i + 2, j - i - 2));
                if (std::find(t.slots_.begin(), t.slots_.end(), name) == t.slots_.end()) {
                    t.slots_.push_back(name);
                }
                t.segments_.push_back({true, std::move(name)});
                i = j + 2;
                continue;
            }
        }
        literal.push_back(text[i++]);
    }
    if (!literal.empty()) t.segments_.push_back({false, std::move(literal)});
    return t;
}

bool PromptTemplate::references(std::string_view slot) const {
    return std::find(slots_.begin(), slots_.end(), slot) != slots_.end();
}

std::string PromptTemplate::render(const SlotMap& values) const {
    for (const auto& s : slots_) {
        if (values.find(s) == values.end()) throw MissingSlot(s);
    }
    std::string out;
    for (const auto& seg : segments_) {
        out += seg.is_slot ? values.find(seg.text)->second : seg.text;
    }
    return out;
}

const std::vector<std::string>& PromptRegistry::known_slots() {
    static const std::vector<std::string> slots{"document", "summary",  "topic",
                                                "triplets", "exemplars", "format_instructions",
                                                "suggestions"};
    return slots;
}

std::vector<PromptKey> PromptRegistry::required_keys() {
    std::vector<PromptKey> keys;
    for (Setting s : {Setting::Quality, Setting::Control, Setting::Faithfulness}) {
        keys.push_back({Role::Summarizer, s, Stage::Summarize});
        keys.push_back({Role::Summarizer, s, Stage::Refine});
        keys.push_back({Role::Evaluator, s, Stage::Evaluate});
    }
    return keys;
}

PromptRegistry PromptRegistry::from_manifest(
    std::string_view manifest_json, const std::function<std::string(const std::string&)>& read) {
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(manifest_json);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("prompt manifest is not valid JSON: ") + e.what());
    }
    if (m.value("format", "") != "summit-prompts" || m.value("version", 0) != 1) {
        throw ConfigError("prompt manifest must declare format summit-prompts, version 1");
    }
    PromptRegistry reg;
    try {
        for (Role r : {Role::Summarizer, Role::Evaluator}) {
            std::string name(to_string(r));
            reg.system_[r] = strip_one_trailing_newline(read(m.at("system").at(name)));
            reg.format_[r] =
                strip_one_trailing_newline(read(m.at("format_instructions").at(name)));
        }
        for (const auto& entry : m.at("templates")) {
            PromptKey key{parse_role(entry.at("role").get<std::string>()),
                          parse_setting(entry.at("setting").get<std::string>()),
                          parse_stage(entry.at("stage").get<std::string>())};
            std::string text = strip_one_trailing_newline(read(entry.at("file")));
            if (!reg.templates_.emplace(key, PromptTemplate::parse(text)).second) {
                throw ConfigError("duplicate prompt template for " + key_name(key));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed prompt manifest: ") + e.what());
    }
    reg.validate();
    return reg;
}

PromptRegistry PromptRegistry::load(const std::filesystem::path& manifest) {
    auto base = manifest.parent_path();
    return from_manifest(read_text_file(manifest), [&](const std::string& rel) {
        return read_text_file(base / rel);
    });
}

void PromptRegistry::validate() const {
    const auto& known = known_slots();
    for (const auto& key : required_keys()) {
        auto it = templates_.find(key);
        if (it == templates_.end()) throw ConfigError("missing prompt template " + key_name(key));
        const PromptTemplate& t = it->second;
        for (const auto& s : t.slots()) {
            if (std::find(known.begin(), known.end(), s) == known.end()) {
                throw ConfigError("template " + key_name(key) + " references unknown slot '" + s +
                                  "'");
            }
        }
        auto require = [&](const char* slot) {
            if (!t.references(slot)) {
                throw ConfigError("template " + key_name(key) + " must reference {{" +
                                  std::string(slot) + "}}");
            }
        };
        switch (key.stage) {
            case Stage::Summarize: require("document"); break;
            case Stage::Refine: require("suggestions"); break;
            case Stage::Evaluate:
                require("document");
                require("summary");
                break;
        }
        if (key.stage != Stage::Refine) {
            if (key.setting == Setting::Control) require("topic");
            if (key.setting == Setting::Faithfulness) require("triplets");
        }
        if (key.setting != Setting::Control && t.references("topic")) {
            throw ConfigError("template " + key_name(key) + " references {{topic}} outside control");
        }
        if (key.setting != Setting::Faithfulness && t.references("triplets")) {
            throw ConfigError("template " + key_name(key) +
                              " references {{triplets}} outside faithfulness");
        }
    }
    for (const auto& [key, t] : templates_) {
        if (key.role == Role::Evaluator && key.stage != Stage::Evaluate) {
            throw ConfigError("evaluator templates only support the evaluate stage");
        }
        if (key.role == Role::Summarizer && key.stage == Stage::Evaluate) {
            throw ConfigError("summarizer templates do not support the evaluate stage");
        }
    }
}

const PromptTemplate& PromptRegistry::user_template(Role role, Setting setting, Stage stage) const {
    auto it = templates_.find({role, setting, stage});
    if (it == templates_.end()) {
        throw ConfigError("no prompt template for " + key_name({role, setting, stage}));
    }
    return it->second;
}

const std::string& PromptRegistry::system_prompt(Role role) const { return system_.at(role); }

const std::string& PromptRegistry::format_instructions(Role role) const {
    return format_.at(role);
}

std::string PromptRegistry::fingerprint() const {
    std::string blob;
    auto append = [&](std::string_view tag, std::string_view text) {
        blob += tag;
        blob += '\0';
        blob += std::to_string(text.size());
        blob += '\0';
        blob += text;
    };
    for (const auto& [role, text] : system_) append("system", text);
    for (const auto& [role, text] : format_) append("format", text);
    for (const auto& [key, t] : templates_) append(key_name(key), t.source());
    return detail::sha256_hex(blob);
}

RenderedPrompt render(const PromptRegistry& registry, Role role, Setting setting, Stage stage,
                      const SlotMap& context) {
    const PromptTemplate& t = registry.user_template(role, setting, stage);
    SlotMap values = context;
    values.try_emplace("format_instructions", registry.format_instructions(role));
    values.try_emplace("exemplars", "");
    return {registry.system_prompt(role), t.render(values)};
}

std::string render_exemplars(std::span<const Exemplar> exemplars, Role role, std::size_t limit) {
    std::string out;
    std::size_t n = 0;
    for (const auto& ex : exemplars) {
        if (n == limit) break;
        bool for_evaluator = ex.explanation.has_value();
        if (for_evaluator != (role == Role::Evaluator)) continue;
        ++n;
        out += "Example " + std::to_string(n) + ":\n";
        out += "Document: " + ex.document + "\n";
        out += "Summary: " + ex.summary + "\n";
        if (for_evaluator) out += "Evaluation: " + *ex.explanation + "\n";
        out += "\n";
    }
    return out;
}

std::vector<Exemplar> load_exemplars(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound(path.string());
    std::vector<Exemplar> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = nlohmann::json::parse(line);
            Exemplar ex{j.at("document").get<std::string>(), j.at("summary").get<std::string>(),
                        std::nullopt};
            if (j.contains("explanation") && !j["explanation"].is_null()) {
                ex.explanation = j["explanation"].get<std::string>();
            }
            if (ex.document.empty() || ex.summary.empty()) {
                throw ConfigError("empty document or summary");
            }
            out.push_back(std::move(ex));
        } catch (const std::exception& e) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": bad exemplar: " + e.what());
        }
    }
    return out;
}

}  // namespace summit

namespace summit {
namespace detail {
const std::map<std::string, std::string>& builtin_prompt_files();
}

PromptRegistry PromptRegistry::builtin() {
    static const PromptRegistry registry = [] {
        const auto& files = detail::builtin_prompt_files();
        auto read = [&](const std::string& name) -> const std::string& {
            auto it = files.find(name);
            if (it == files.end()) throw ConfigError("builtin prompt file missing: " + name);
            return it->second;
        };
        return from_manifest(read("manifest.json"), read);
    }();
    return registry;
}

}  // namespace summit
