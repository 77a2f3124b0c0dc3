#include <algorithm>
#include <cctype>
#include <cmath>

#include "summit/errors.hpp"
#include "summit/metrics.hpp"
#include "summit/prompting.hpp"

namespace summit {
namespace {

bool is_alnum(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u >= 0x80;
}
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool iends_with(std::string_view s, std::string_view suffix) {
    if (s.size() < suffix.size()) return false;
    return ascii_lower(s.substr(s.size() - suffix.size())) == suffix;
}

struct Pattern {
    std::string_view phrase;  // lowercase
    EditKind kind;
    bool takes_target;
};

constexpr Pattern kPatterns[] = {
    {"add the information of", EditKind::Add, true},
    {"remove the information of", EditKind::Remove, true},
    {"rephrase the information of", EditKind::Rephrase, true},
    {"shorten the summary", EditKind::Simplify, false},
    {"keep the summary unchanged", EditKind::Keep, false},
    {"do nothing", EditKind::Keep, false},
};

struct Match {
    std::size_t begin;
    std::size_t end;  // one past the phrase
    const Pattern* pattern;
};

// A terminator ends a sentence: newline, or . ! ? ; followed by whitespace,
// end of text, a closing quote/bracket, or a '<' (as in "X.<STOP>").
bool is_terminator(std::string_view text, std::size_t i) {
    char c = text[i];
    if (c == '\n' || c == '\r') return true;
    if (c != '.' && c != '!' && c != '?' && c != ';') return false;
    if (i + 1 == text.size()) return true;
    char next = text[i + 1];
    return is_space(next) || next == '"' || next == '\'' || next == ')' || next == ']' ||
           next == '<';
}

std::string clean_target(std::string_view raw, EditKind kind) {
    std::string_view t = trim(raw);
    while (!t.empty() && (t.back() == ',' || t.back() == ':')) t = trim(t.substr(0, t.size() - 1));
    const std::string_view suffix = kind == EditKind::Remove     ? " from the summary"
                                    : kind == EditKind::Rephrase ? " in the summary"
                                                                 : " to the summary";
    // The role phrase ends the target even when more words follow it.
    for (std::size_t i = 0; i + suffix.size() <= t.size(); ++i) {
        if (!iends_with(t.substr(0, i + suffix.size()), suffix)) continue;
        std::size_t after = i + suffix.size();
        if (after == t.size() || !std::isalnum(static_cast<unsigned char>(t[after]))) {
            t = trim(t.substr(0, i));
            break;
        }
    }
    auto wrapped = [&](char open, char close) {
        return t.size() >= 2 && t.front() == open && t.back() == close;
    };
    if (wrapped('[', ']') || wrapped('"', '"') || wrapped('\'', '\'') || wrapped('<', '>') ||
        wrapped('(', ')')) {
        t = trim(t.substr(1, t.size() - 2));
    }
    return std::string(t);
}

// ---- score distribution scanning -------------------------------------------------

struct Cursor {
    std::string_view text;
    std::size_t pos;

    bool done() const { return pos >= text.size(); }
    char peek(std::size_t off = 0) const {
        return pos + off < text.size() ? text[pos + off] : '\0';
    }
};

// Parses a non-negative decimal, optionally followed by '%'.
std::optional<double> read_number(Cursor& c) {
    std::size_t start = c.pos;
    std::size_t i = c.pos;
    bool digits = false;
    while (i < c.text.size() && std::isdigit(static_cast<unsigned char>(c.text[i]))) {
        ++i;
        digits = true;
    }
    if (i < c.text.size() && c.text[i] == '.' && i + 1 < c.text.size() &&
        std::isdigit(static_cast<unsigned char>(c.text[i + 1]))) {
        ++i;
        while (i < c.text.size() && std::isdigit(static_cast<unsigned char>(c.text[i]))) ++i;
        digits = true;
    }
    if (!digits) return std::nullopt;
    double v = std::stod(std::string(c.text.substr(start, i - start)));
    if (i < c.text.size() && c.text[i] == '%') {
        v /= 100.0;
        ++i;
    }
    c.pos = i;
    return v;
}

void skip_spaces(Cursor& c) {
    while (!c.done() && (c.peek() == ' ' || c.peek() == '\t')) ++c.pos;
}

// Separators between score pairs: whitespace, punctuation, and the words
// "score(s)" / "and".
void skip_separators(Cursor& c) {
    for (;;) {
        std::size_t before = c.pos;
        while (!c.done() && (is_space(c.peek()) || c.peek() == ',' || c.peek() == ';' ||
                             c.peek() == '|' || c.peek() == '{' || c.peek() == '}' ||
                             c.peek() == '[' || c.peek() == ']' || c.peek() == '(' ||
                             c.peek() == ')')) {
            ++c.pos;
        }
        for (std::string_view word : {"scores", "score", "and"}) {
            if (c.pos + word.size() <= c.text.size() &&
                ascii_lower(c.text.substr(c.pos, word.size())) == word &&
                (c.pos + word.size() == c.text.size() || !is_alnum(c.text[c.pos + word.size()]))) {
                c.pos += word.size();
                break;
            }
        }
        if (c.pos == before) return;
    }
}

// One "s:p" pair at the cursor; score digit must not continue a number or word.
std::optional<std::pair<int, double>> read_pair(Cursor& c) {
    Cursor t = c;
    char d = t.peek();
    if (d < '1' || d > '5') return std::nullopt;
    if (t.pos > 0 && (is_alnum(t.text[t.pos - 1]) || t.text[t.pos - 1] == '.')) return std::nullopt;
    if (std::isdigit(static_cast<unsigned char>(t.peek(1)))) return std::nullopt;
    ++t.pos;
    skip_spaces(t);
    if (t.peek() == '"' || t.peek() == '\'') {
        ++t.pos;
        skip_spaces(t);
    }
    if (t.peek() != ':' && t.peek() != '=') return std::nullopt;
    ++t.pos;
    skip_spaces(t);
    auto v = read_number(t);
    if (!v) return std::nullopt;
    c = t;
    return std::pair{d - '0', *v};
}

std::optional<std::vector<double>> pairs_at(std::string_view text, std::size_t pos) {
    Cursor c{text, pos};
    std::vector<double> probs(5, 0.0);
    std::vector<bool> seen(5, false);
    int count = 0;
    while (true) {
        auto pair = read_pair(c);
        if (!pair) break;
        auto [score, p] = *pair;
        if (seen[score - 1]) break;
        seen[score - 1] = true;
        probs[score - 1] = p;
        ++count;
        Cursor next = c;
        skip_separators(next);
        // A closing quote after the key ("1": 0.2) is consumed by read_pair;
        // an opening quote before the next key is consumed here.
        if (next.peek() == '"' || next.peek() == '\'') ++next.pos;
        c = next;
    }
    if (count < 2) return std::nullopt;
    return probs;
}

std::optional<std::vector<double>> positional_at(std::string_view text, std::size_t pos) {
    char open = text[pos];
    char close = open == '[' ? ']' : open == '(' ? ')' : '\0';
    if (!close) return std::nullopt;
    Cursor c{text, pos + 1};
    std::vector<double> probs;
    while (true) {
        skip_spaces(c);
        auto v = read_number(c);
        if (!v) return std::nullopt;
        probs.push_back(*v);
        skip_spaces(c);
        if (c.peek() == close) break;
        if (c.peek() != ',' && c.peek() != ';') return std::nullopt;
        ++c.pos;
    }
    if (probs.size() != 5) return std::nullopt;
    return probs;
}

}  // namespace

std::vector<EditOp> parse_edit_ops(std::string_view raw) {
    const std::string lower = ascii_lower(raw);
    std::vector<Match> matches;
    for (const Pattern& p : kPatterns) {
        for (std::size_t at = lower.find(p.phrase); at != std::string::npos;
             at = lower.find(p.phrase, at + 1)) {
            std::size_t end = at + p.phrase.size();
            if (at > 0 && is_alnum(lower[at - 1])) continue;
            if (end < lower.size() && is_alnum(lower[end])) continue;
            matches.push_back({at, end, &p});
        }
    }
    std::sort(matches.begin(), matches.end(),
              [](const Match& a, const Match& b) { return a.begin < b.begin; });

    std::vector<EditOp> ops;
    for (std::size_t m = 0; m < matches.size(); ++m) {
        const Match& match = matches[m];
        if (m > 0 && match.begin < matches[m - 1].end) continue;
        if (!match.pattern->takes_target) {
            ops.push_back({match.pattern->kind, std::nullopt});
            continue;
        }
        std::size_t limit = m + 1 < matches.size() ? matches[m + 1].begin : raw.size();
        std::size_t stop = match.end;
        while (stop < limit && !is_terminator(raw, stop)) ++stop;
        std::string target = clean_target(raw.substr(match.end, stop - match.end),
                                          match.pattern->kind);
        if (!target.empty()) ops.push_back({match.pattern->kind, std::move(target)});
    }
    return ops;
}

std::string surface_form(const EditOp& op) {
    const std::string t = op.target.value_or("");
    switch (op.kind) {
        case EditKind::Add: return "Add the information of " + t + ".";
        case EditKind::Remove: return "Remove the information of " + t + " from the summary.";
        case EditKind::Rephrase: return "Rephrase the information of " + t + " in the summary.";
        case EditKind::Simplify: return "Shorten the summary.";
        case EditKind::Keep: return "Do nothing.";
    }
    return {};
}

std::optional<ParsedDistribution> parse_score_distribution(std::string_view raw) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
        std::optional<std::vector<double>> probs = pairs_at(raw, i);
        if (!probs) probs = positional_at(raw, i);
        if (!probs) continue;
        double mass = 0.0;
        for (double p : *probs) mass += p;
        if (!(mass > 0.0) || !std::isfinite(mass)) continue;
        ParsedDistribution out;
        out.renormalized = std::abs(mass - 1.0) > 1e-6;
        for (int s = 0; s < 5; ++s) {
            out.probabilities[s] = out.renormalized ? (*probs)[s] / mass : (*probs)[s];
        }
        return out;
    }
    return std::nullopt;
}

Feedback parse_feedback(std::string_view raw, std::string_view stop_marker, bool strict) {
    if (stop_marker.empty()) throw ConfigError("stop marker must be non-empty");
    Feedback fb;
    fb.raw = std::string(raw);
    fb.stop_requested = raw.find(stop_marker) != std::string_view::npos;
    fb.edit_ops = parse_edit_ops(raw);
    if (auto dist = parse_score_distribution(raw)) {
        fb.score_distribution = dist->probabilities;
        fb.parse_quality = dist->renormalized ? ParseQuality::Renormalized : ParseQuality::Parsed;
    } else {
        if (strict) throw ParseError("no score distribution found in evaluator output");
        fb.score_distribution = {0.2, 0.2, 0.2, 0.2, 0.2};
        fb.parse_quality = ParseQuality::Unparsed;
    }
    fb.expected_score = std::clamp(expected_score(fb.score_distribution).value, 1.0, 5.0);
    return fb;
}

}  // namespace summit
