#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "summit/http.hpp"

namespace summit {

struct Triplet {
    std::string subject;
    std::string relation;
    std::string object;
    std::optional<double> confidence;

    bool operator==(const Triplet&) const = default;
};

class TripletExtractor {
public:
    virtual ~TripletExtractor() = default;
    /// Throws std::invalid_argument on empty (after trimming) text.
    virtual std::vector<Triplet> extract(std::string_view text) const = 0;
};

/// Rule-based, low-recall extractor for offline use. Per sentence: subject is
/// everything before the first finite-verb group, relation is that group plus
/// trailing particles/prepositions, object is the remainder. At most one
/// triplet per sentence, confidence 0.5.
class NaiveExtractor final : public TripletExtractor {
public:
    std::vector<Triplet> extract(std::string_view text) const override;
};

/// Client for an OpenIE-style annotation server. POSTs the text as
/// text/plain and reads {"sentences":[{"openie":[{"subject","relation",
/// "object","confidence"?}]}]}.
class RemoteExtractor final : public TripletExtractor {
public:
    RemoteExtractor(std::string endpoint, std::shared_ptr<HttpTransport> transport = nullptr);
    /// Throws RemoteUnavailable on transport failure, non-2xx, or a bad reply.
    std::vector<Triplet> extract(std::string_view text) const override;

private:
    std::string endpoint_;
    std::shared_ptr<HttpTransport> transport_;
};

/// Tries `primary`; on RemoteUnavailable uses `fallback`.
class FallbackExtractor final : public TripletExtractor {
public:
    FallbackExtractor(std::shared_ptr<const TripletExtractor> primary,
                      std::shared_ptr<const TripletExtractor> fallback);
    std::vector<Triplet> extract(std::string_view text) const override;

private:
    std::shared_ptr<const TripletExtractor> primary_;
    std::shared_ptr<const TripletExtractor> fallback_;
};

/// Keeps the first occurrence of each (subject, relation, object).
std::vector<Triplet> dedup_triplets(std::span<const Triplet> triplets);

/// Highest confidence first (missing counts as 0.5, ties keep input order),
/// truncated to `limit`.
std::vector<Triplet> select_triplets(std::span<const Triplet> triplets, std::size_t limit = 20);

/// One "(subject; relation; object)" line per triplet, joined by '\n'.
std::string render_triplets(std::span<const Triplet> triplets);

}  // namespace summit
