#include "summit/knowledge.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "summit/errors.hpp"

namespace summit {
namespace {

const std::unordered_set<std::string> kAuxiliaries{
    "is",  "are",   "was",   "were",  "am",   "has",    "have",  "had",   "does",
    "do",  "did",   "will",  "would", "can",  "could",  "may",   "might", "must",
    "shall", "should", "isn't", "aren't", "wasn't", "weren't", "hasn't", "haven't",
    "hadn't", "doesn't", "don't", "didn't", "won't", "wouldn't", "can't", "couldn't"};

const std::unordered_set<std::string> kIrregularFinite{
    "said",  "made",   "went",   "took",  "became", "won",    "lost",  "left",   "gave",
    "found", "told",   "came",   "saw",   "got",    "held",   "began", "brought", "thought",
    "led",   "met",    "paid",   "ran",   "sold",   "bought", "built", "wrote",  "spoke",
    "kept",  "felt",   "fell",   "knew",  "grew",   "drew",   "threw", "chose",  "rose",
    "struck", "sent",  "spent",  "stood", "caught", "taught", "fought", "sought", "says",
    "plays", "makes",  "takes",  "joins", "signs",  "wants",  "needs", "remains", "becomes",
    "includes", "shows", "leads", "holds", "gets",  "goes",   "sees",  "scored", "beat"};

// Past participles and adverbs that may continue a verb group.
const std::unordered_set<std::string> kGroupContinuation{
    "be",    "been",  "being", "not",   "never", "also",  "still", "already", "just",
    "done",  "gone",  "taken", "given", "seen",  "known", "made",  "become",  "won",
    "held",  "left",  "sold",  "built", "found", "kept",  "paid",  "lost",    "brought"};

const std::unordered_set<std::string> kParticles{
    "to", "for",  "with", "by",  "from",  "in",    "on",  "at",     "into", "of",
    "up", "out",  "off",  "over", "about", "as",   "against", "onto", "upon", "after"};

// -ed words that are rarely verbs.
const std::unordered_set<std::string> kEdExceptions{
    "hundred", "bed",   "red",     "shed",  "seed",   "speed",  "feed", "breed",
    "greed",   "sacred", "naked",  "wicked", "hatred", "kindred", "need", "indeed"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return std::string(s);
}

std::string strip_punct(std::string_view s) {
    auto punct = [](char c) {
        return c == ',' || c == '"' || c == '\'' || c == ':' || c == ';' || c == '(' ||
               c == ')' || c == '.' || c == '!' || c == '?';
    };
    while (!s.empty() && punct(s.front())) s.remove_prefix(1);
    while (!s.empty() && punct(s.back())) s.remove_suffix(1);
    return std::string(s);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool all_lower_alpha(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || c == '\'' || c == '-';
    });
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Raw token (original case) is needed: capitalized words are treated as names.
bool is_finite_verb(const std::string& raw) {
    std::string w = strip_punct(raw);
    if (!all_lower_alpha(w)) return false;
    if (kAuxiliaries.count(w) || kIrregularFinite.count(w)) return true;
    return w.size() >= 4 && ends_with(w, "ed") && !kEdExceptions.count(w);
}

bool continues_group(const std::string& raw) {
    std::string w = strip_punct(raw);
    if (!all_lower_alpha(w)) return false;
    if (kGroupContinuation.count(w) || kAuxiliaries.count(w)) return true;
    if (w.size() >= 5 && ends_with(w, "ing")) return true;
    return w.size() >= 4 && ends_with(w, "ed") && !kEdExceptions.count(w);
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        bool end = c == '\n' ||
                   ((c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || is_space(text[i + 1])));
        if (end) {
            if (c != '\n') cur.push_back(c);
            if (auto t = trim(cur); !t.empty()) out.push_back(t);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (auto t = trim(cur); !t.empty()) out.push_back(t);
    return out;
}

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> words;
    std::string cur;
    for (char c : s) {
        if (is_space(c)) {
            if (!cur.empty()) words.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

std::string join(const std::vector<std::string>& words, std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
        if (i > from) out.push_back(' ');
        out += words[i];
    }
    return out;
}

std::optional<Triplet> extract_sentence(const std::string& sentence) {
    auto words = split_words(sentence);
    std::size_t verb = 1;
    while (verb < words.size() && !is_finite_verb(words[verb])) ++verb;
    if (verb >= words.size()) return std::nullopt;
    std::size_t end = verb + 1;
    while (end < words.size() && continues_group(words[end])) ++end;
    while (end < words.size() && kParticles.count(lower(strip_punct(words[end])))) ++end;
    if (end >= words.size()) return std::nullopt;

    Triplet t{strip_punct(join(words, 0, verb)), strip_punct(join(words, verb, end)),
              strip_punct(join(words, end, words.size())), 0.5};
    if (trim(t.subject).empty() || trim(t.relation).empty() || trim(t.object).empty()) {
        return std::nullopt;
    }
    return t;
}

void require_text(std::string_view text) {
    if (trim(text).empty()) throw std::invalid_argument("triplet extraction needs non-empty text");
}

}  // namespace

std::vector<Triplet> NaiveExtractor::extract(std::string_view text) const {
    require_text(text);
    std::vector<Triplet> out;
    for (const auto& sentence : split_sentences(text)) {
        if (auto t = extract_sentence(sentence)) out.push_back(std::move(*t));
    }
    return dedup_triplets(out);
}

RemoteExtractor::RemoteExtractor(std::string endpoint, std::shared_ptr<HttpTransport> transport)
    : endpoint_(std::move(endpoint)), transport_(std::move(transport)) {
    if (endpoint_.empty()) throw ConfigError("knowledge.endpoint is not configured");
    if (!transport_) transport_ = make_http_transport();
}

std::vector<Triplet> RemoteExtractor::extract(std::string_view text) const {
    require_text(text);
    HttpRequest req;
    req.url = endpoint_;
    req.body = std::string(text);
    req.content_type = "text/plain; charset=utf-8";
    req.connect_timeout = std::chrono::seconds(5);
    HttpResponse resp = transport_->post(req);
    if (resp.status == 0) throw RemoteUnavailable("annotation server unreachable: " + resp.error);
    if (resp.status < 200 || resp.status >= 300) {
        throw RemoteUnavailable("annotation server returned HTTP " + std::to_string(resp.status));
    }
    std::vector<Triplet> out;
    try {
        auto j = nlohmann::json::parse(resp.body);
        for (const auto& sentence : j.at("sentences")) {
            if (!sentence.contains("openie")) continue;
            for (const auto& triple : sentence["openie"]) {
                Triplet t{trim(triple.value("subject", "")), trim(triple.value("relation", "")),
                          trim(triple.value("object", "")), std::nullopt};
                if (t.subject.empty() || t.relation.empty() || t.object.empty()) continue;
                if (triple.contains("confidence") && triple["confidence"].is_number()) {
                    t.confidence = std::clamp(triple["confidence"].get<double>(), 0.0, 1.0);
                }
                out.push_back(std::move(t));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw RemoteUnavailable(std::string("annotation server reply unparseable: ") + e.what());
    }
    return dedup_triplets(out);
}

FallbackExtractor::FallbackExtractor(std::shared_ptr<const TripletExtractor> primary,
                                     std::shared_ptr<const TripletExtractor> fallback)
    : primary_(std::move(primary)), fallback_(std::move(fallback)) {}

std::vector<Triplet> FallbackExtractor::extract(std::string_view text) const {
    try {
        return primary_->extract(text);
    } catch (const RemoteUnavailable&) {
        return fallback_->extract(text);
    }
}

std::vector<Triplet> dedup_triplets(std::span<const Triplet> triplets) {
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    std::vector<Triplet> out;
    for (const auto& t : triplets) {
        if (seen.emplace(t.subject, t.relation, t.object).second) out.push_back(t);
    }
    return out;
}

std::vector<Triplet> select_triplets(std::span<const Triplet> triplets, std::size_t limit) {
    std::vector<Triplet> out(triplets.begin(), triplets.end());
    std::stable_sort(out.begin(), out.end(), [](const Triplet& a, const Triplet& b) {
        return a.confidence.value_or(0.5) > b.confidence.value_or(0.5);
    });
    if (out.size() > limit) out.resize(limit);
    return out;
}

std::string render_triplets(std::span<const Triplet> triplets) {
    std::string out;
    for (std::size_t i = 0; i < triplets.size(); ++i) {
        if (i) out.push_back('\n');
        out += "(" + triplets[i].subject + "; " + triplets[i].relation + "; " +
               triplets[i].object + ")";
    }
    return out;
}

}  // namespace summit
