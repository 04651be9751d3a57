#include "citegraph/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <unordered_map>
#include <unordered_set>
#include <numeric>
#include <stdexcept>

#include "citegraph/error.hpp"

namespace citegraph {

Scorer parse_scorer(std::string_view name)
{
    if (name == "tfidf") {
        return Scorer::tfidf;
    }
    if (name == "bm25") {
        return Scorer::bm25;
    }
    if (name == "cosine") {
        return Scorer::cosine;
    }
    throw std::invalid_argument("unknown scorer: " + std::string(name));
}

std::string_view to_string(Scorer scorer)
{
    switch (scorer) {
    case Scorer::tfidf:
        return "tfidf";
    case Scorer::bm25:
        return "bm25";
    case Scorer::cosine:
        return "cosine";
    }
    return "bm25";
}

Selector parse_selector(std::string_view name)
{
    if (name == "topk" || name == "top-k") {
        return Selector::top_k;
    }
    if (name == "qai") {
        return Selector::qai;
    }
    throw std::invalid_argument("unknown selector: " + std::string(name));
}

std::string_view to_string(Selector selector)
{
    return selector == Selector::top_k ? "topk" : "qai";
}

void PipelineConfig::validate() const
{
    if (budget == 0) {
        throw std::invalid_argument("budget must be at least 1");
    }
    if (selector == Selector::qai && !partition_key) {
        throw std::invalid_argument("the qai selector requires a partition key");
    }
    if (prefilter && *prefilter < budget) {
        throw std::invalid_argument("prefilter must be at least the budget");
    }
    if (scorer == Scorer::bm25) {
        bm25.validate();
    }
}

std::optional<std::size_t> PipelineConfig::effective_prefilter() const
{
    if (prefilter) {
        return prefilter;
    }
    if (scorer == Scorer::cosine && selector == Selector::qai) {
        return std::max(default_embedding_prefilter, budget);
    }
    return std::nullopt;
}

Query Query::from_document(const Document& doc)
{
    return Query{doc.id, query_text(doc), std::nullopt};
}

namespace {

/// Candidate ids with their raw relevance scores, best first.
struct ScoredPool {
    std::vector<std::string> ids;
    std::vector<double> scores;
};

LexicalScorer lexical_kind(Scorer scorer)
{
    return scorer == Scorer::tfidf ? LexicalScorer::tfidf : LexicalScorer::bm25;
}

ScoredPool lexical_pool(const PipelineConfig& config, const Resources& res, const Query& query, std::size_t limit)
{
    if (res.index == nullptr) {
        throw DataError("lexical scoring requires an index");
    }
    if (res.index->tokenizer().tokenize(query.text).empty()) {
        throw DataError("query " + (query.id.empty() ? std::string("<text>") : query.id)
                        + " has no terms after tokenization");
    }
    std::unordered_set<std::string> exclude;
    if (!query.id.empty()) {
        exclude.insert(query.id);
    }
    auto ranked = rank_lexical(*res.index, query.text, lexical_kind(config.scorer), limit, config.bm25, exclude,
                               config.exec);
    ScoredPool pool;
    for (auto& doc : ranked) {
        pool.ids.push_back(std::move(doc.id));
        pool.scores.push_back(doc.score);
    }
    return pool;
}

ScoredPool cosine_pool(const PipelineConfig& config, const Resources& res, const Query& query, std::size_t limit)
{
    if (res.embeddings == nullptr) {
        throw DataError("cosine scoring requires an embedding file");
    }
    const auto& emb = *res.embeddings;
    std::span<const float> qvec;
    if (query.vector) {
        qvec = *query.vector;
    } else {
        if (query.id.empty() || !emb.find(query.id)) {
            throw DataError("missing embedding for query " + (query.id.empty() ? std::string("<text>") : query.id));
        }
        qvec = emb.vector(query.id);
    }
    std::vector<std::uint8_t> allowed(emb.size(), 0);
    for (std::size_t r = 0; r < emb.size(); ++r) {
        allowed[r] = emb.id(r) != query.id && res.candidates->contains(emb.id(r)) ? 1 : 0;
    }
    ScoredPool pool;
    for (auto& n : knn_masked(emb, qvec, limit, allowed, config.exec)) {
        pool.ids.push_back(std::move(n.id));
        pool.scores.push_back(n.cosine);
    }
    return pool;
}

ScoredPool score_pool(const PipelineConfig& config, const Resources& res, const Query& query, std::size_t limit)
{
    return config.scorer == Scorer::cosine ? cosine_pool(config, res, query, limit)
                                           : lexical_pool(config, res, query, limit);
}

}  // namespace

RecommendationList recommend(const PipelineConfig& config, const Resources& resources, const Query& query)
{
    config.validate();
    if (resources.candidates == nullptr || resources.candidates->empty()) {
        throw DataError("empty candidate pool");
    }

    if (config.selector == Selector::top_k) {
        auto pool = score_pool(config, resources, query, config.budget);
        if (pool.ids.empty()) {
            throw DataError("empty candidate pool for query " + query.id);
        }
        RecommendationList list;
        list.ids = std::move(pool.ids);
        list.scores = pool.scores;
        // ranking maximizes the modular objective: sum of scores
        list.gains = std::move(pool.scores);
        double total = 0.0;
        for (double g : list.gains) {
            total += g;
            list.objective_trace.push_back(total);
        }
        list.objective = total;
        return list;
    }

    auto limit = config.effective_prefilter().value_or(std::numeric_limits<std::size_t>::max());
    auto pool = score_pool(config, resources, query, limit);
    if (pool.ids.empty()) {
        throw DataError("empty candidate pool for query " + query.id);
    }

    std::vector<const Document*> docs;
    docs.reserve(pool.ids.size());
    for (const auto& id : pool.ids) {
        docs.push_back(&resources.candidates->at(id));
    }
    SelectionProblem problem;
    problem.candidates = pool.ids;
    problem.budget = config.budget;
    problem.rewards = build_rewards(pool.scores);
    problem.partition = partition_documents(docs, *config.partition_key);

    QaiObjective objective(problem);
    auto list = greedy_select(problem, objective, config.exec);
    // report the scorer's relevance rather than the clamped reward
    std::unordered_map<std::string_view, double> raw;
    raw.reserve(pool.ids.size());
    for (std::size_t i = 0; i < pool.ids.size(); ++i) {
        raw.emplace(pool.ids[i], pool.scores[i]);
    }
    for (std::size_t i = 0; i < list.ids.size(); ++i) {
        list.scores[i] = raw.at(list.ids[i]);
    }
    return list;
}

Run recommend_batch(const PipelineConfig& config, const Resources& resources, std::span<const Query> queries)
{
    config.validate();
    std::vector<std::vector<std::string>> results(queries.size());
    auto inner = config;
    // parallelism moves to the query level
    inner.exec = Exec::serial;
    auto count = static_cast<std::int64_t>(queries.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (config.exec == Exec::parallel)
    for (std::int64_t i = 0; i < count; ++i) {
        auto idx = static_cast<std::size_t>(i);
        try {
            results[idx] = recommend(inner, resources, queries[idx]).ids;
        } catch (...) {
#pragma omp critical(citegraph_batch_failure)
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    Run run;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        if (!run.emplace(queries[i].id, std::move(results[i])).second) {
            throw DataError("duplicate query id in batch: " + queries[i].id);
        }
    }
    return run;
}

}  // namespace citegraph
