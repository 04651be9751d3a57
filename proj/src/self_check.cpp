#include "citegraph/self_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "citegraph/embedding.hpp"
#include "citegraph/submodular.hpp"

namespace citegraph {

double rescan_lexical_score(std::span<const std::string> texts, const Tokenizer& tokenizer, std::string_view query,
                            std::size_t doc, LexicalScorer scorer, const Bm25Params& params)
{
    std::vector<std::vector<std::string>> tokenized;
    tokenized.reserve(texts.size());
    double total_length = 0.0;
    for (const auto& text : texts) {
        tokenized.push_back(tokenizer.tokenize(text));
        total_length += static_cast<double>(tokenized.back().size());
    }
    auto n = static_cast<double>(texts.size());
    auto avg = total_length / n;
    const auto& tokens = tokenized[doc];
    auto length = static_cast<double>(tokens.size());

    double score = 0.0;
    for (const auto& term : tokenizer.unique_terms(query)) {
        auto tf = static_cast<double>(std::count(tokens.begin(), tokens.end(), term));
        if (tf == 0.0) {
            continue;
        }
        double df = 0.0;
        for (const auto& other : tokenized) {
            if (std::find(other.begin(), other.end(), term) != other.end()) {
                df += 1.0;
            }
        }
        score += scorer == LexicalScorer::tfidf ? tfidf_term_weight(tf, length, n, df)
                                                : bm25_term_weight(tf, length, avg, n, df, params);
    }
    return score;
}

namespace {

CheckResult check_partition_objective(std::uint64_t seed, std::size_t trials)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> reward(0.0, 1.0);
    SelectionProblem problem;
    std::vector<std::string> labels;
    for (int i = 0; i < 12; ++i) {
        problem.candidates.push_back("c" + std::to_string(i));
        problem.rewards.push_back(reward(rng));
        labels.push_back(std::to_string(i % 4));
    }
    problem.partition = Partition::from_labels(labels);
    auto report = check_submodular(
        [&](std::span<const std::size_t> s) { return qai_objective(problem, s); }, problem.candidates.size(),
        trials, seed);
    return {"partition-objective-submodular", report.violations == 0,
            std::to_string(report.violations) + " violations in " + std::to_string(report.trials) + " trials"};
}

CheckResult check_supermodular_control(std::uint64_t seed, std::size_t trials)
{
    std::vector<double> rewards{0.5, 1.0, 1.5, 2.0, 2.5};
    auto report = check_submodular(
        [&](std::span<const std::size_t> s) {
            double sum = 0.0;
            for (auto i : s) {
                sum += rewards[i];
            }
            return sum * sum;
        },
        rewards.size(), trials, seed);
    return {"supermodular-control-flagged", report.violations > 0,
            std::to_string(report.violations) + " violations in " + std::to_string(report.trials) + " trials"};
}

std::vector<std::string> random_texts(std::mt19937_64& rng, std::size_t docs, std::size_t vocab)
{
    std::uniform_int_distribution<std::size_t> length(0, 12);
    std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
    std::vector<std::string> texts;
    for (std::size_t d = 0; d < docs; ++d) {
        std::string text;
        auto len = length(rng);
        for (std::size_t i = 0; i < len; ++i) {
            text += "w" + std::to_string(word(rng)) + " ";
        }
        texts.push_back(std::move(text));
    }
    return texts;
}

Corpus corpus_from_texts(const std::vector<std::string>& texts)
{
    std::vector<Document> docs;
    for (std::size_t d = 0; d < texts.size(); ++d) {
        Document doc;
        doc.id = "d" + std::to_string(d);
        doc.title = texts[d];
        doc.year = 2000;
        docs.push_back(std::move(doc));
    }
    return Corpus(std::move(docs));
}

CheckResult check_index_against_rescan(std::uint64_t seed)
{
    std::mt19937_64 rng(seed ^ 0x5eedULL);
    double worst = 0.0;
    std::size_t compared = 0;
    for (int round = 0; round < 10; ++round) {
        auto texts = random_texts(rng, 40, 20);
        auto corpus = corpus_from_texts(texts);
        auto index = InvertedIndex::build(corpus);
        auto query = random_texts(rng, 1, 20).front() + "w3";
        for (std::size_t d = 0; d < texts.size(); ++d) {
            auto id = corpus[d].id;
            worst = std::max(worst, std::abs(tfidf_score(index, query, id)
                                             - rescan_lexical_score(texts, index.tokenizer(), query, d,
                                                                    LexicalScorer::tfidf)));
            worst = std::max(worst, std::abs(bm25_score(index, query, id)
                                             - rescan_lexical_score(texts, index.tokenizer(), query, d,
                                                                    LexicalScorer::bm25)));
            compared += 2;
        }
    }
    std::ostringstream detail;
    detail << "max |index - rescan| = " << worst << " over " << compared << " scores";
    return {"index-matches-rescan", worst < 1e-9, detail.str()};
}

CheckResult check_parallel_kernels(std::uint64_t seed)
{
    std::mt19937_64 rng(seed ^ 0xfeedULL);
    auto texts = random_texts(rng, 200, 30);
    auto index = InvertedIndex::build(corpus_from_texts(texts));
    auto terms = index.tokenizer().unique_terms("w1 w2 w3 w5 w8 w13");
    bool same = true;
    for (auto scorer : {LexicalScorer::tfidf, LexicalScorer::bm25}) {
        auto a = score_all(index, terms, scorer, {}, Exec::serial);
        auto b = score_all(index, terms, scorer, {}, Exec::parallel);
        same = same && a.score == b.score && a.matched == b.matched;
    }

    std::normal_distribution<float> gauss;
    std::vector<std::string> ids;
    std::vector<float> values;
    for (int r = 0; r < 300; ++r) {
        ids.push_back("e" + std::to_string(r));
        for (int c = 0; c < 16; ++c) {
            values.push_back(gauss(rng));
        }
    }
    EmbeddingMatrix emb(16, ids, values);
    auto query = emb.row(7);
    same = same && knn(emb, query, 50, {}, Exec::serial) == knn(emb, query, 50, {}, Exec::parallel);
    return {"parallel-matches-serial", same, same ? "bit-identical" : "parallel and serial kernels differ"};
}

}  // namespace

std::vector<CheckResult> run_self_checks(std::uint64_t seed, std::size_t trials)
{
    return {check_partition_objective(seed, trials), check_supermodular_control(seed, trials),
            check_index_against_rescan(seed), check_parallel_kernels(seed)};
}

}  // namespace citegraph
