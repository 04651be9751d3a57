#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citegraph/citation_graph.hpp"
#include "citegraph/embedding.hpp"
#include "citegraph/exec.hpp"

namespace citegraph {

enum class NegativeStrategy { random, nearest, farthest };

NegativeStrategy parse_negative_strategy(std::string_view name);
std::string_view to_string(NegativeStrategy strategy);

enum class PairLabel { positive, negative };

struct SiamesePair {
    std::string query_id;
    std::string other_id;
    double target_sim;
    PairLabel label;

    bool operator==(const SiamesePair&) const = default;
};

struct Triplet {
    std::string anchor_id;
    std::string positive_id;
    std::string negative_id;

    bool operator==(const Triplet&) const = default;
};

struct PairOptions {
    int max_d = 1;
    double theta = 0.4;
    NegativeStrategy strategy = NegativeStrategy::random;
    std::uint64_t seed = 0;
    Direction direction = Direction::forward;
    /// Triplets only: pair every positive with every selected negative
    /// instead of one negative per positive.
    bool cross_product = false;
    Exec exec = Exec::parallel;
};

/// A query for which fewer non-positive documents existed than positives.
struct Shortfall {
    std::string query_id;
    std::size_t requested;
    std::size_t available;

    bool operator==(const Shortfall&) const = default;
};

struct PairSet {
    /// Sorted by (query_id, label, other_id); positives sort before negatives.
    std::vector<SiamesePair> pairs;
    std::vector<Shortfall> shortfalls;
};

struct TripletSet {
    /// Sorted by (anchor_id, positive_id, negative_id).
    std::vector<Triplet> triplets;
    std::vector<Shortfall> shortfalls;
};

/// Picks up to `count` negatives for `query_id` among the graph nodes that
/// are neither the query nor in `excluded` (sorted ids).
///  - random: uniform without replacement, seeded per (seed, query id);
///  - nearest: highest cosine to the query first;
///  - farthest: lowest cosine first.
/// Cosine ties are broken by ascending id. The embedding strategies only
/// consider documents that have a vector, and throw DataError when `emb` is
/// null or lacks the query.
std::vector<std::string> select_negatives(const CitationGraph& graph, const EmbeddingMatrix* emb,
                                          std::string_view query_id,
                                          std::span<const std::string> excluded, std::size_t count,
                                          NegativeStrategy strategy, std::uint64_t seed);

/// All positives up to options.max_d for each query plus as many negatives.
PairSet generate_pairs(const CitationGraph& graph, const EmbeddingMatrix* emb,
                       std::span<const std::string> query_ids, const PairOptions& options);

/// One triplet per positive, each paired with one selected negative (reused
/// cyclically on a shortfall), or the full cross-product when requested.
TripletSet generate_triplets(const CitationGraph& graph, const EmbeddingMatrix* emb,
                             std::span<const std::string> query_ids, const PairOptions& options);

/// max(s_neg - s_pos + 1, 0).
double triplet_loss(double s_pos, double s_neg);

/// Header line {"seed","strategy","max_d","theta"} then one record per line.
void write_pairs_jsonl(std::ostream& out, const PairSet& set, const PairOptions& options);
void write_triplets_jsonl(std::ostream& out, const TripletSet& set, const PairOptions& options);

}  // namespace citegraph
