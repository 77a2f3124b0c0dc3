#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "summit/http.hpp"
#include "summit/types.hpp"

namespace summit {

/// Lowercases ASCII letters and splits on every maximal run of characters
/// that are not ASCII alphanumerics. Bytes >= 0x80 count as word characters,
/// so UTF-8 words stay intact. No stemming, no stopwords.
std::vector<std::string> tokenize(std::string_view text);

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    static RougeScore from_counts(double overlap, double candidate_total, double reference_total);
};

/// Clipped n-gram overlap. Throws std::invalid_argument when n < 1.
RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n);
RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   int n);

RougeScore rouge_l(std::string_view candidate, std::string_view reference);
RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

struct RougeTriple {
    RougeScore rouge1, rouge2, rougeL;
};

/// Scores against each reference and keeps the best F1 per metric.
/// Throws EmptyInput when `references` is empty.
RougeTriple rouge_all(std::string_view candidate, std::span<const std::string> references);

struct ExpectedScore {
    double value = 0.0;
    bool renormalized = false;
};

/// Σ s·p(s) over scores 1..5. Renormalizes (and flags it) when the mass is
/// off by more than 1e-6. Throws DegenerateDistribution on zero mass and
/// std::invalid_argument on keys outside 1..5 or negative probabilities.
ExpectedScore expected_score(const std::map<int, double>& distribution);
ExpectedScore expected_score(const ScoreDistribution& distribution);

/// Cosine similarity of term-frequency vectors; 0 when either side has no tokens.
double topic_similarity(std::string_view query, std::string_view summary);

/// Client for an external consistency classifier.
/// Wire: POST {"document": ..., "summary": ...} → a bare number or {"score": x}.
class FaithfulnessScorer {
public:
    FaithfulnessScorer(std::string endpoint, std::shared_ptr<HttpTransport> transport);

    /// Throws RemoteUnavailable on transport failure, non-2xx, or a malformed reply.
    double score(std::string_view document, std::string_view summary) const;
    std::vector<double> score_batch(
        std::span<const std::pair<std::string, std::string>> pairs) const;

private:
    std::string endpoint_;
    std::shared_ptr<HttpTransport> transport_;
};

struct CorpusStats {
    std::string name;
    double mean = 0.0;
    std::size_t count = 0;
    std::vector<double> values;
};

/// Throws EmptyInput on an empty list.
CorpusStats aggregate(std::vector<double> values, std::string name);

}  // namespace summit
