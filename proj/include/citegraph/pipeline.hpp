#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citegraph/corpus.hpp"
#include "citegraph/embedding.hpp"
#include "citegraph/exec.hpp"
#include "citegraph/inverted_index.hpp"
#include "citegraph/metrics.hpp"
#include "citegraph/submodular.hpp"

namespace citegraph {

enum class Scorer { tfidf, bm25, cosine };
enum class Selector { top_k, qai };

Scorer parse_scorer(std::string_view name);
std::string_view to_string(Scorer scorer);
Selector parse_selector(std::string_view name);
std::string_view to_string(Selector selector);

/// Candidate pool size used before submodular selection over embeddings
/// when no prefilter is configured.
inline constexpr std::size_t default_embedding_prefilter = 1000;

struct PipelineConfig {
    Scorer scorer = Scorer::bm25;
    Selector selector = Selector::top_k;
    std::optional<PartitionKey> partition_key;
    std::size_t budget = 10;
    /// Keep only the N best-scoring candidates before selection.
    std::optional<std::size_t> prefilter;
    Bm25Params bm25;
    Exec exec = Exec::parallel;

    /// Throws std::invalid_argument: qai without a partition key, zero
    /// budget, or a prefilter smaller than the budget.
    void validate() const;

    /// Configured prefilter, or the default: none for lexical scoring,
    /// default_embedding_prefilter for cosine + qai.
    [[nodiscard]] std::optional<std::size_t> effective_prefilter() const;
};

/// Read-only inputs. The index, when used, must cover exactly the candidate corpus.
struct Resources {
    const Corpus* candidates = nullptr;
    const InvertedIndex* index = nullptr;
    const EmbeddingMatrix* embeddings = nullptr;
};

struct Query {
    /// Excluded from the candidates; may be empty for free text.
    std::string id;
    std::string text;
    /// Precomputed query embedding for free-text queries; otherwise the
    /// row stored under `id` is used.
    std::optional<std::vector<float>> vector;

    static Query from_document(const Document& doc);
};

/// Scores the candidates against the query and selects at most `budget`
/// of them. Never returns the query itself or duplicates.
RecommendationList recommend(const PipelineConfig& config, const Resources& resources, const Query& query);

/// One recommendation per query; queries run concurrently when
/// config.exec is parallel and the result is keyed (so ordered) by query id.
Run recommend_batch(const PipelineConfig& config, const Resources& resources, std::span<const Query> queries);

}  // namespace citegraph
