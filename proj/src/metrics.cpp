#include "citegraph/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "citegraph/error.hpp"

namespace citegraph {

double reciprocal_rank(std::span<const std::string> predicted, const IdSet& truth)
{
    if (truth.empty()) {
        throw std::invalid_argument("reciprocal_rank: empty truth set");
    }
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (truth.contains(predicted[i])) {
            return 1.0 / static_cast<double>(i + 1);
        }
    }
    return 0.0;
}

PrecisionRecall f1_at_k(std::span<const std::string> predicted, const IdSet& truth, std::size_t k)
{
    if (truth.empty()) {
        throw std::invalid_argument("f1_at_k: empty truth set");
    }
    if (k == 0) {
        throw std::invalid_argument("f1_at_k: k must be at least 1");
    }
    auto top = std::min(k, predicted.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < top; ++i) {
        if (truth.contains(predicted[i])) {
            ++hits;
        }
    }
    PrecisionRecall pr;
    pr.precision = static_cast<double>(hits) / static_cast<double>(k);
    pr.recall = static_cast<double>(hits) / static_cast<double>(truth.size());
    if (pr.precision + pr.recall > 0.0) {
        pr.f1 = 2.0 * pr.precision * pr.recall / (pr.precision + pr.recall);
    }
    return pr;
}

EvalResult evaluate(const Run& run, const Truth& truth, std::span<const std::size_t> ks, F1Mode mode, Exec exec)
{
    for (auto k : ks) {
        if (k == 0) {
            throw std::invalid_argument("evaluate: k must be at least 1");
        }
    }
    for (const auto& [query, predictions] : run) {
        if (!truth.contains(query)) {
            throw DataError("run query has no truth entry: " + query);
        }
    }
    for (const auto& [query, refs] : truth) {
        if (!run.contains(query)) {
            throw DataError("truth query missing from run: " + query);
        }
    }

    std::vector<const std::string*> queries;
    EvalResult result;
    for (const auto& [query, refs] : truth) {
        if (refs.empty()) {
            ++result.excluded;
        } else {
            queries.push_back(&query);
        }
    }

    std::vector<QueryEval> evals(queries.size());
    auto count = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 16) if (exec == Exec::parallel)
    for (std::int64_t i = 0; i < count; ++i) {
        const auto& query = *queries[static_cast<std::size_t>(i)];
        const auto& predicted = run.at(query);
        const auto& refs = truth.at(query);
        auto& e = evals[static_cast<std::size_t>(i)];
        e.reciprocal_rank = reciprocal_rank(predicted, refs);
        for (auto k : ks) {
            e.at_k[k] = f1_at_k(predicted, refs, k);
        }
    }

    result.num_queries = queries.size();
    if (queries.empty()) {
        for (auto k : ks) {
            result.f1_at_k[k] = result.precision_at_k[k] = result.recall_at_k[k] = 0.0;
        }
        return result;
    }
    auto n = static_cast<double>(queries.size());
    double rr_sum = 0.0;
    std::map<std::size_t, double> p_sum;
    std::map<std::size_t, double> r_sum;
    std::map<std::size_t, double> f_sum;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        rr_sum += evals[i].reciprocal_rank;
        for (const auto& [k, pr] : evals[i].at_k) {
            p_sum[k] += pr.precision;
            r_sum[k] += pr.recall;
            f_sum[k] += pr.f1;
        }
        result.per_query.emplace(*queries[i], std::move(evals[i]));
    }
    result.mrr = rr_sum / n;
    for (auto k : ks) {
        auto p = p_sum[k] / n;
        auto r = r_sum[k] / n;
        result.precision_at_k[k] = p;
        result.recall_at_k[k] = r;
        if (mode == F1Mode::mean_f1) {
            result.f1_at_k[k] = f_sum[k] / n;
        } else {
            result.f1_at_k[k] = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
        }
    }
    return result;
}

nlohmann::ordered_json to_json(const EvalResult& result)
{
    nlohmann::ordered_json out;
    out["mrr"] = result.mrr;
    nlohmann::ordered_json f1 = nlohmann::ordered_json::object();
    for (const auto& [k, value] : result.f1_at_k) {
        f1[std::to_string(k)] = value;
    }
    out["f1"] = f1;
    out["num_queries"] = result.num_queries;
    return out;
}

Truth truth_from_corpus(const Corpus& queries, const Corpus& corpus)
{
    Truth truth;
    for (const auto& doc : queries.documents()) {
        auto refs = corpus.resolvable_references(doc);
        truth.emplace(doc.id, IdSet(refs.begin(), refs.end()));
    }
    return truth;
}

void write_run_jsonl(std::ostream& out, const Run& run)
{
    for (const auto& [query, ranked] : run) {
        nlohmann::ordered_json record;
        record["q"] = query;
        record["ranked"] = ranked;
        out << record.dump() << '\n';
    }
}

Run read_run_jsonl(std::istream& in)
{
    Run run;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto where = "run record at line " + std::to_string(line_no);
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError("malformed " + where + ": " + e.what());
        }
        if (!record.is_object() || !record.contains("q") || !record["q"].is_string() || !record.contains("ranked")
            || !record["ranked"].is_array()) {
            throw DataError("malformed " + where + ": expected {\"q\": str, \"ranked\": [str]}");
        }
        std::vector<std::string> ranked;
        for (const auto& id : record["ranked"]) {
            if (!id.is_string()) {
                throw DataError("malformed " + where + ": ranked ids must be strings");
            }
            ranked.push_back(id.get<std::string>());
        }
        auto query = record["q"].get<std::string>();
        if (!run.emplace(query, std::move(ranked)).second) {
            throw DataError("duplicate query " + query + " in " + where);
        }
    }
    return run;
}

Run load_run(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot read run file: " + path.string());
    }
    try {
        return read_run_jsonl(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::vector<std::size_t> parse_ks(std::string_view text)
{
    std::vector<std::size_t> ks;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto part = text.substr(start, end - start);
        std::size_t k = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), k);
        if (ec != std::errc{} || ptr != part.data() + part.size() || k == 0) {
            throw std::invalid_argument("cut-offs must be positive integers separated by commas, got: "
                                        + std::string(text));
        }
        ks.push_back(k);
        start = end + 1;
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

}  // namespace citegraph
