#include "summit/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "summit/errors.hpp"

namespace summit {
namespace {

bool is_word_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::unordered_map<std::string, int> ngram_counts(std::span<const std::string> tokens, int n) {
    std::unordered_map<std::string, int> counts;
    if (tokens.size() < static_cast<std::size_t>(n)) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key;
        for (int j = 0; j < n; ++j) {
            if (j) key.push_back('\x1f');
            key += tokens[i + j];
        }
        ++counts[key];
    }
    return counts;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (is_word_byte(c)) {
            cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

RougeScore RougeScore::from_counts(double overlap, double candidate_total, double reference_total) {
    RougeScore s;
    s.precision = candidate_total > 0 ? overlap / candidate_total : 0.0;
    s.recall = reference_total > 0 ? overlap / reference_total : 0.0;
    s.f1 = (s.precision + s.recall) > 0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   int n) {
    if (n < 1) throw std::invalid_argument("rouge_n: n must be >= 1");
    auto cand = ngram_counts(candidate, n);
    auto ref = ngram_counts(reference, n);
    long cand_total = 0, ref_total = 0, overlap = 0;
    for (const auto& [g, c] : cand) cand_total += c;
    for (const auto& [g, c] : ref) {
        ref_total += c;
        if (auto it = cand.find(g); it != cand.end()) overlap += std::min(c, it->second);
    }
    return RougeScore::from_counts(overlap, cand_total, ref_total);
}

RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n) {
    auto c = tokenize(candidate);
    auto r = tokenize(reference);
    return rouge_n(c, r, n);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
    double l = static_cast<double>(lcs_length(candidate, reference));
    return RougeScore::from_counts(l, static_cast<double>(candidate.size()),
                                   static_cast<double>(reference.size()));
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
    auto c = tokenize(candidate);
    auto r = tokenize(reference);
    return rouge_l(c, r);
}

RougeTriple rouge_all(std::string_view candidate, std::span<const std::string> references) {
    if (references.empty()) throw EmptyInput("rouge_all: no reference summaries");
    auto cand = tokenize(candidate);
    RougeTriple best;
    bool first = true;
    for (const auto& reference : references) {
        auto ref = tokenize(reference);
        RougeTriple t{rouge_n(cand, ref, 1), rouge_n(cand, ref, 2), rouge_l(cand, ref)};
        if (first || t.rouge1.f1 > best.rouge1.f1) best.rouge1 = t.rouge1;
        if (first || t.rouge2.f1 > best.rouge2.f1) best.rouge2 = t.rouge2;
        if (first || t.rougeL.f1 > best.rougeL.f1) best.rougeL = t.rougeL;
        first = false;
    }
    return best;
}

ExpectedScore expected_score(const std::map<int, double>& distribution) {
    double mass = 0.0, weighted = 0.0;
    for (const auto& [score, p] : distribution) {
        if (score < 1 || score > 5) {
            throw std::invalid_argument("expected_score: score " + std::to_string(score) +
                                        " outside 1..5");
        }
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("expected_score: probabilities must be finite and >= 0");
        }
        mass += p;
        weighted += score * p;
    }
    if (mass == 0.0) throw DegenerateDistribution();
    if (std::abs(mass - 1.0) <= 1e-6) return {weighted, false};
    return {weighted / mass, true};
}

ExpectedScore expected_score(const ScoreDistribution& distribution) {
    std::map<int, double> m;
    for (int s = 1; s <= 5; ++s) m[s] = distribution[s - 1];
    return expected_score(m);
}

double topic_similarity(std::string_view query, std::string_view summary) {
    auto q = tokenize(query);
    auto s = tokenize(summary);
    if (q.empty() || s.empty()) return 0.0;
    std::unordered_map<std::string, double> qv, sv;
    for (const auto& t : q) qv[t] += 1.0;
    for (const auto& t : s) sv[t] += 1.0;
    double dot = 0.0, qn = 0.0, sn = 0.0;
    for (const auto& [t, c] : qv) {
        qn += c * c;
        if (auto it = sv.find(t); it != sv.end()) dot += c * it->second;
    }
    for (const auto& [t, c] : sv) sn += c * c;
    return std::clamp(dot / (std::sqrt(qn) * std::sqrt(sn)), 0.0, 1.0);
}

FaithfulnessScorer::FaithfulnessScorer(std::string endpoint,
                                       std::shared_ptr<HttpTransport> transport)
    : endpoint_(std::move(endpoint)), transport_(std::move(transport)) {
    if (endpoint_.empty()) throw ConfigError("faithfulness scorer endpoint is not configured");
    if (!transport_) transport_ = make_http_transport();
}

double FaithfulnessScorer::score(std::string_view document, std::string_view summary) const {
    HttpRequest req;
    req.url = endpoint_;
    req.body = nlohmann::json{{"document", document}, {"summary", summary}}.dump();
    HttpResponse resp = transport_->post(req);
    if (resp.status == 0) throw RemoteUnavailable("faithfulness scorer unreachable: " + resp.error);
    if (resp.status < 200 || resp.status >= 300) {
        throw RemoteUnavailable("faithfulness scorer returned HTTP " + std::to_string(resp.status));
    }
    double value = 0.0;
    try {
        auto j = nlohmann::json::parse(resp.body);
        if (j.is_number()) {
            value = j.get<double>();
        } else if (j.is_object() && j.contains("score") && j["score"].is_number()) {
            value = j["score"].get<double>();
        } else {
            throw RemoteUnavailable("faithfulness scorer reply is not a number");
        }
    } catch (const nlohmann::json::exception& e) {
        throw RemoteUnavailable(std::string("faithfulness scorer reply unparseable: ") + e.what());
    }
    if (!(value >= 0.0 && value <= 1.0)) {
        throw RemoteUnavailable("faithfulness score outside [0,1]: " + std::to_string(value));
    }
    return value;
}

std::vector<double> FaithfulnessScorer::score_batch(
    std::span<const std::pair<std::string, std::string>> pairs) const {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& [doc, summary] : pairs) out.push_back(score(doc, summary));
    return out;
}

CorpusStats aggregate(std::vector<double> values, std::string name) {
    if (values.empty()) throw EmptyInput("aggregate: no values for " + name);
    double sum = 0.0;
    for (double v : values) sum += v;
    CorpusStats s;
    s.name = std::move(name);
    s.count = values.size();
    s.mean = sum / static_cast<double>(values.size());
    s.values = std::move(values);
    return s;
}

}  // namespace summit
