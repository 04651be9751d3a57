#include "citegraph/pairs.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <random>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "citegraph/error.hpp"

namespace citegraph {

NegativeStrategy parse_negative_strategy(std::string_view name)
{
    if (name == "random") {
        return NegativeStrategy::random;
    }
    if (name == "nearest") {
        return NegativeStrategy::nearest;
    }
    if (name == "farthest") {
        return NegativeStrategy::farthest;
    }
    throw std::invalid_argument("unknown negative strategy: " + std::string(name));
}

std::string_view to_string(NegativeStrategy strategy)
{
    switch (strategy) {
    case NegativeStrategy::random:
        return "random";
    case NegativeStrategy::nearest:
        return "nearest";
    case NegativeStrategy::farthest:
        return "farthest";
    }
    return "random";
}

namespace {

// FNV-1a, stable across platforms unlike std::hash
std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

struct QueryExamples {
    std::vector<PositiveExample> positives;
    std::vector<std::string> negatives;
    std::size_t requested = 0;
};

QueryExamples mine_query(const CitationGraph& graph, const EmbeddingMatrix* emb, const std::string& query_id,
                         const PairOptions& options)
{
    QueryExamples ex;
    ex.positives = positives(graph, query_id, options.max_d, options.theta, options.direction);
    std::vector<std::string> excluded;
    excluded.reserve(ex.positives.size());
    for (const auto& p : ex.positives) {
        excluded.push_back(p.positive_id);
    }
    std::sort(excluded.begin(), excluded.end());
    ex.requested = ex.positives.size();
    ex.negatives = select_negatives(graph, emb, query_id, excluded, ex.requested, options.strategy, options.seed);
    return ex;
}

/// Runs mine_query for every (deduplicated, sorted) query, in parallel when asked.
std::vector<std::pair<std::string, QueryExamples>> mine_all(const CitationGraph& graph, const EmbeddingMatrix* emb,
                                                            std::span<const std::string> query_ids,
                                                            const PairOptions& options)
{
    if (options.strategy != NegativeStrategy::random && emb == nullptr) {
        throw DataError(std::string("negative strategy \"") + std::string(to_string(options.strategy))
                        + "\" requires an embedding file");
    }
    std::vector<std::string> queries(query_ids.begin(), query_ids.end());
    std::sort(queries.begin(), queries.end());
    queries.erase(std::unique(queries.begin(), queries.end()), queries.end());
    for (const auto& q : queries) {
        (void)graph.node(q);
    }

    std::vector<std::pair<std::string, QueryExamples>> results(queries.size());
    auto count = static_cast<std::int64_t>(queries.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (options.exec == Exec::parallel)
    for (std::int64_t i = 0; i < count; ++i) {
        auto idx = static_cast<std::size_t>(i);
        try {
            results[idx] = {queries[idx], mine_query(graph, emb, queries[idx], options)};
        } catch (...) {
#pragma omp critical(citegraph_pairs_failure)
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return results;
}

void record_shortfall(std::vector<Shortfall>& out, const std::string& query_id, const QueryExamples& ex)
{
    if (ex.negatives.size() < ex.requested) {
        out.push_back({query_id, ex.requested, ex.negatives.size()});
    }
}

nlohmann::ordered_json header(const PairOptions& options)
{
    nlohmann::ordered_json h;
    h["seed"] = options.seed;
    h["strategy"] = to_string(options.strategy);
    h["max_d"] = options.max_d;
    h["theta"] = options.theta;
    return h;
}

}  // namespace

std::vector<std::string> select_negatives(const CitationGraph& graph, const EmbeddingMatrix* emb,
                                          std::string_view query_id, std::span<const std::string> excluded,
                                          std::size_t count, NegativeStrategy strategy, std::uint64_t seed)
{
    auto query_node = graph.node(query_id);
    std::span<const float> query_vec;
    if (strategy != NegativeStrategy::random) {
        if (emb == nullptr) {
            throw DataError(std::string("negative strategy \"") + std::string(to_string(strategy))
                            + "\" requires an embedding file");
        }
        query_vec = emb->vector(query_id);
    }

    // Node numbering follows id order, so the pool comes out sorted by id.
    std::vector<std::uint32_t> pool;
    for (std::uint32_t n = 0; n < graph.num_nodes(); ++n) {
        if (n == query_node || std::binary_search(excluded.begin(), excluded.end(), graph.id(n))) {
            continue;
        }
        pool.push_back(n);
    }
    count = std::min(count, pool.size());
    std::vector<std::string> chosen;
    if (count == 0) {
        return chosen;
    }

    if (strategy == NegativeStrategy::random) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(fnv1a(query_id)),
                          static_cast<std::uint32_t>(fnv1a(query_id) >> 32)};
        std::mt19937_64 rng(seq);
        std::vector<std::uint32_t> picked;
        picked.reserve(count);
        std::sample(pool.begin(), pool.end(), std::back_inserter(picked), count, rng);
        for (auto n : picked) {
            chosen.push_back(graph.id(n));
        }
        return chosen;
    }

    std::vector<std::pair<double, std::uint32_t>> scored;
    scored.reserve(pool.size());
    for (auto n : pool) {
        auto row = emb->find(graph.id(n));
        if (!row) {
            continue;
        }
        auto sim = cosine(query_vec, emb->row(*row));
        if (std::isnan(sim)) {
            continue;
        }
        scored.emplace_back(sim, n);
    }
    count = std::min(count, scored.size());
    bool nearest = strategy == NegativeStrategy::nearest;
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(count), scored.end(),
                      [nearest](const auto& a, const auto& b) {
                          if (a.first != b.first) {
                              return nearest ? a.first > b.first : a.first < b.first;
                          }
                          return a.second < b.second;
                      });
    for (std::size_t i = 0; i < count; ++i) {
        chosen.push_back(graph.id(scored[i].second));
    }
    return chosen;
}

PairSet generate_pairs(const CitationGraph& graph, const EmbeddingMatrix* emb,
                       std::span<const std::string> query_ids, const PairOptions& options)
{
    PairSet set;
    for (auto& [query_id, ex] : mine_all(graph, emb, query_ids, options)) {
        for (auto& p : ex.positives) {
            set.pairs.push_back({query_id, std::move(p.positive_id), p.target_sim, PairLabel::positive});
        }
        for (auto& n : ex.negatives) {
            set.pairs.push_back({query_id, std::move(n), 0.0, PairLabel::negative});
        }
        record_shortfall(set.shortfalls, query_id, ex);
    }
    std::sort(set.pairs.begin(), set.pairs.end(), [](const SiamesePair& a, const SiamesePair& b) {
        return std::tie(a.query_id, a.label, a.other_id) < std::tie(b.query_id, b.label, b.other_id);
    });
    return set;
}

TripletSet generate_triplets(const CitationGraph& graph, const EmbeddingMatrix* emb,
                             std::span<const std::string> query_ids, const PairOptions& options)
{
    TripletSet set;
    for (auto& [query_id, ex] : mine_all(graph, emb, query_ids, options)) {
        record_shortfall(set.shortfalls, query_id, ex);
        if (ex.negatives.empty()) {
            continue;
        }
        if (options.cross_product) {
            for (const auto& p : ex.positives) {
                for (const auto& n : ex.negatives) {
                    set.triplets.push_back({query_id, p.positive_id, n});
                }
            }
            continue;
        }
        for (std::size_t i = 0; i < ex.positives.size(); ++i) {
            set.triplets.push_back({query_id, ex.positives[i].positive_id, ex.negatives[i % ex.negatives.size()]});
        }
    }
    std::sort(set.triplets.begin(), set.triplets.end(), [](const Triplet& a, const Triplet& b) {
        return std::tie(a.anchor_id, a.positive_id, a.negative_id)
               < std::tie(b.anchor_id, b.positive_id, b.negative_id);
    });
    return set;
}

double triplet_loss(double s_pos, double s_neg)
{
    return std::max(s_neg - s_pos + 1.0, 0.0);
}

void write_pairs_jsonl(std::ostream& out, const PairSet& set, const PairOptions& options)
{
    out << header(options).dump() << '\n';
    for (const auto& p : set.pairs) {
        nlohmann::ordered_json record;
        record["q"] = p.query_id;
        record["d"] = p.other_id;
        record["sim"] = p.target_sim;
        record["label"] = p.label == PairLabel::positive ? "pos" : "neg";
        out << record.dump() << '\n';
    }
}

void write_triplets_jsonl(std::ostream& out, const TripletSet& set, const PairOptions& options)
{
    out << header(options).dump() << '\n';
    for (const auto& t : set.triplets) {
        nlohmann::ordered_json record;
        record["q"] = t.anchor_id;
        record["pos"] = t.positive_id;
        record["neg"] = t.negative_id;
        out << record.dump() << '\n';
    }
}

}  // namespace citegraph
