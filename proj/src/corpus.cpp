#include "summit/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "summit/errors.hpp"

namespace summit {
namespace {

constexpr const char* kCorpusFormat = "summit-corpus";

bool blank(std::string_view s) {
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* field) {
    if (!j.contains(field)) return {};
    const auto& arr = j.at(field);
    if (!arr.is_array()) throw std::invalid_argument(std::string(field) + " must be an array");
    std::vector<std::string> out;
    for (const auto& v : arr) {
        if (!v.is_string()) throw std::invalid_argument(std::string(field) + " must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

DatasetRecord parse_record(std::string_view line, CorpusSchema schema) {
    auto j = nlohmann::json::parse(line);
    if (!j.is_object()) throw std::invalid_argument("record is not an object");
    DatasetRecord r;
    if (!j.contains("id") || !j["id"].is_string()) throw std::invalid_argument("missing string id");
    if (!j.contains("document") || !j["document"].is_string()) {
        throw std::invalid_argument("missing string document");
    }
    r.id = j["id"].get<std::string>();
    r.document = j["document"].get<std::string>();
    r.summaries = string_list(j, "summaries");
    r.topics = string_list(j, "topics");

    if (r.id.empty()) throw std::invalid_argument("empty id");
    if (blank(r.document)) throw std::invalid_argument("empty document");
    if (r.summaries.empty()) throw std::invalid_argument("no reference summaries");
    for (const auto& s : r.summaries) {
        if (blank(s)) throw std::invalid_argument("empty reference summary");
    }
    if (r.topics.size() > 2) throw std::invalid_argument("more than two topics");
    if (schema == CorpusSchema::Newts) {
        if (r.topics.size() != 2 || r.summaries.size() != 2) {
            throw std::invalid_argument("NEWTS records need exactly two topics and two summaries");
        }
        for (const auto& t : r.topics) {
            if (blank(t)) throw std::invalid_argument("empty topic");
        }
    }
    return r;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Unbiased draw in [0, bound) by rejection.
std::uint64_t bounded(std::uint64_t& state, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
        x = splitmix64(state);
    } while (x >= limit);
    return x % bound;
}

}  // namespace

CorpusSchema parse_corpus_schema(std::string_view name) {
    if (name == "generic") return CorpusSchema::Generic;
    if (name == "newts") return CorpusSchema::Newts;
    throw ConfigError("unknown corpus schema '" + std::string(name) + "' (generic|newts)");
}

std::string_view to_string(CorpusSchema s) {
    return s == CorpusSchema::Newts ? "newts" : "generic";
}

Split parse_split(std::string_view name) {
    if (name == "dev") return Split::Dev;
    if (name == "test") return Split::Test;
    throw ConfigError("unknown split '" + std::string(name) + "' (dev|test)");
}

std::string_view to_string(Split s) { return s == Split::Dev ? "dev" : "test"; }

LoadResult parse_corpus(std::string_view text, CorpusSchema schema, bool strict) {
    LoadResult result;
    std::unordered_set<std::string> ids;
    std::size_t pos = 0;
    int lineno = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (blank(line)) continue;
        if (lineno == 1) {
            auto header = nlohmann::json::parse(line, nullptr, false);
            if (header.is_object() && header.contains("format")) {
                if (header.value("format", "") != kCorpusFormat || header.value("version", 0) != 1) {
                    throw SchemaViolation("unsupported corpus header", {1});
                }
                continue;
            }
        }
        try {
            DatasetRecord r = parse_record(line, schema);
            if (!ids.insert(r.id).second) throw std::invalid_argument("duplicate id " + r.id);
            result.records.push_back(std::move(r));
        } catch (const std::exception& e) {
            result.issues.push_back({lineno, e.what()});
        }
    }
    if (strict && !result.issues.empty()) {
        std::vector<int> lines;
        std::string what = "corpus schema violations:";
        for (const auto& issue : result.issues) {
            lines.push_back(issue.line);
            what += " line " + std::to_string(issue.line) + " (" + issue.reason + ")";
        }
        throw SchemaViolation(what, std::move(lines));
    }
    return result;
}

LoadResult load_corpus(const std::filesystem::path& path, CorpusSchema schema, bool strict) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound(path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_corpus(ss.str(), schema, strict);
}

std::string serialize_corpus(std::span<const DatasetRecord> records) {
    std::string out = nlohmann::json{{"format", kCorpusFormat}, {"version", 1}}.dump() + "\n";
    for (const auto& r : records) {
        nlohmann::json j{{"id", r.id},
                         {"document", r.document},
                         {"summaries", r.summaries},
                         {"topics", r.topics}};
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::uint64_t state = seed;
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(bounded(state, i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

std::vector<DatasetRecord> sample(std::span<const DatasetRecord> records, const SampleSpec& spec) {
    if (spec.n > records.size()) throw SampleTooLarge(spec.n, records.size());
    auto perm = seeded_permutation(records.size(), spec.seed);
    std::vector<DatasetRecord> out;
    out.reserve(spec.n);
    for (std::size_t k = 0; k < spec.n; ++k) {
        std::size_t idx = spec.split == Split::Dev ? perm[k] : perm[perm.size() - 1 - k];
        out.push_back(records[idx]);
    }
    return out;
}

std::size_t word_count(std::string_view text) {
    std::size_t n = 0;
    bool in_word = false;
    for (char c : text) {
        bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_word) ++n;
        in_word = !space;
    }
    return n;
}

LengthStats length_stats(std::span<const DatasetRecord> records) {
    if (records.empty()) throw EmptyInput("length_stats: empty corpus");
    LengthStats s;
    double doc_words = 0.0, sum_words = 0.0;
    for (const auto& r : records) {
        doc_words += static_cast<double>(word_count(r.document));
        for (const auto& sm : r.summaries) {
            sum_words += static_cast<double>(word_count(sm));
            ++s.summaries;
        }
    }
    s.documents = records.size();
    s.mean_document_words = doc_words / static_cast<double>(s.documents);
    s.mean_summary_words = sum_words / static_cast<double>(s.summaries);
    return s;
}

}  // namespace summit
