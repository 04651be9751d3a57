#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "citegraph/corpus.hpp"
#include "citegraph/exec.hpp"

namespace citegraph {

using IdSet = std::unordered_set<std::string>;
/// Query id -> ranked predictions.
using Run = std::map<std::string, std::vector<std::string>>;
/// Query id -> ground-truth citations.
using Truth = std::map<std::string, IdSet>;

/// 1 / rank of the first prediction found in `truth`, 0 if none. Throws
/// std::invalid_argument for an empty truth set.
double reciprocal_rank(std::span<const std::string> predicted, const IdSet& truth);

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Precision over the first k predictions, always divided by k so short
/// lists are penalized; recall divided by |truth|.
PrecisionRecall f1_at_k(std::span<const std::string> predicted, const IdSet& truth, std::size_t k);

/// How the corpus-level F1 is formed.
enum class F1Mode {
    /// Average P and R over queries, then take their harmonic mean.
    mean_precision_recall,
    /// Average the per-query F1 values.
    mean_f1,
};

struct QueryEval {
    double reciprocal_rank = 0.0;
    std::map<std::size_t, PrecisionRecall> at_k;
};

struct EvalResult {
    double mrr = 0.0;
    std::map<std::size_t, double> f1_at_k;
    std::map<std::size_t, double> precision_at_k;
    std::map<std::size_t, double> recall_at_k;
    std::map<std::string, QueryEval> per_query;
    std::size_t num_queries = 0;
    /// Queries skipped because their truth set was empty.
    std::size_t excluded = 0;
};

/// Scores a run against the truth. Every run query must have a truth entry
/// and vice versa (DataError otherwise). Averages are reduced in query-id
/// order regardless of how the per-query work was scheduled.
EvalResult evaluate(const Run& run, const Truth& truth, std::span<const std::size_t> ks,
                    F1Mode mode = F1Mode::mean_precision_recall, Exec exec = Exec::parallel);

/// {"mrr": ..., "f1": {"10": ...}, "num_queries": ...}
nlohmann::ordered_json to_json(const EvalResult& result);

/// Truth for each query document: its references that resolve in `corpus`.
Truth truth_from_corpus(const Corpus& queries, const Corpus& corpus);

/// JSONL {"q": id, "ranked": [id, ...]}, one line per query in id order.
void write_run_jsonl(std::ostream& out, const Run& run);
Run read_run_jsonl(std::istream& in);
Run load_run(const std::filesystem::path& path);

/// "10,20,50,100" -> {10, 20, 50, 100}.
std::vector<std::size_t> parse_ks(std::string_view text);

}  // namespace citegraph
