#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "summit/types.hpp"

namespace summit {

struct DatasetRecord {
    std::string id;
    std::string document;
    std::vector<std::string> summaries;
    /// NEWTS: topics[k] pairs with summaries[k].
    std::vector<std::string> topics;

    Document to_document() const { return {id, document, summaries, topics}; }
};

enum class CorpusSchema { Generic, Newts };
CorpusSchema parse_corpus_schema(std::string_view name);
std::string_view to_string(CorpusSchema s);

struct LoadIssue {
    int line;
    std::string reason;
};

struct LoadResult {
    std::vector<DatasetRecord> records;
    std::vector<LoadIssue> issues;
};

/// Reads the canonical corpus format: UTF-8 JSONL, optional first-line header
/// {"format":"summit-corpus","version":1}, then one
/// {"id","document","summaries":[...],"topics":[...]} record per line.
/// Lenient mode skips bad lines and reports them; strict mode throws
/// SchemaViolation listing every bad line. Throws FileNotFound.
LoadResult load_corpus(const std::filesystem::path& path, CorpusSchema schema, bool strict = false);
LoadResult parse_corpus(std::string_view text, CorpusSchema schema, bool strict = false);

/// One record per line, preceded by the version header.
std::string serialize_corpus(std::span<const DatasetRecord> records);

enum class Split { Dev, Test };
Split parse_split(std::string_view name);
std::string_view to_string(Split s);

struct SampleSpec {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    Split split = Split::Test;
};

/// Seeded uniform sample without replacement. One permutation is derived
/// from the seed; Dev takes from its front and Test from its back, so Dev and
/// Test samples from the same pool and seed are disjoint whenever
/// n_dev + n_test <= pool size. Throws SampleTooLarge.
std::vector<DatasetRecord> sample(std::span<const DatasetRecord> records, const SampleSpec& spec);

/// Seeded permutation of 0..n-1 (Fisher-Yates over a splitmix64 stream).
/// Identical on every platform.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

struct LengthStats {
    double mean_document_words = 0.0;
    double mean_summary_words = 0.0;
    std::size_t documents = 0;
    std::size_t summaries = 0;
};

/// Words are maximal runs of non-whitespace characters.
std::size_t word_count(std::string_view text);

/// Throws EmptyInput for an empty corpus.
LengthStats length_stats(std::span<const DatasetRecord> records);

}  // namespace summit
