#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "citegraph/corpus.hpp"
#include "citegraph/embedding.hpp"
#include "citegraph/inverted_index.hpp"
#include "citegraph/submodular.hpp"

using namespace citegraph;

namespace {

Corpus synthetic_corpus(std::size_t docs, std::size_t vocab)
{
    std::mt19937_64 rng(1);
    // Zipf-ish term draw so a few posting lists get long
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Document> out;
    for (std::size_t d = 0; d < docs; ++d) {
        Document doc;
        doc.id = "p" + std::to_string(d);
        doc.year = 2000;
        for (int i = 0; i < 120; ++i) {
            auto term = static_cast<std::size_t>(std::pow(u(rng), 3.0) * static_cast<double>(vocab));
            doc.title += "w" + std::to_string(term) + ' ';
        }
        out.push_back(std::move(doc));
    }
    return Corpus(std::move(out));
}

const InvertedIndex& shared_index()
{
    static auto index = InvertedIndex::build(synthetic_corpus(20000, 5000));
    return index;
}

const EmbeddingMatrix& shared_embeddings()
{
    static auto emb = [] {
        std::mt19937_64 rng(2);
        std::normal_distribution<float> g;
        std::size_t n = 50000;
        std::size_t dim = 128;
        std::vector<std::string> ids;
        std::vector<float> values(n * dim);
        for (std::size_t i = 0; i < n; ++i) {
            ids.push_back("e" + std::to_string(i));
        }
        for (auto& v : values) {
            v = g(rng);
        }
        return EmbeddingMatrix(dim, std::move(ids), std::move(values));
    }();
    return emb;
}

Exec mode(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_score_all(benchmark::State& state)
{
    const auto& index = shared_index();
    auto terms = index.tokenizer().unique_terms("w0 w1 w2 w3 w5 w8 w13 w21 w34 w55");
    for (auto _ : state) {
        benchmark::DoNotOptimize(score_all(index, terms, LexicalScorer::bm25, {}, mode(state)));
    }
}
BENCHMARK(BM_score_all)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_knn(benchmark::State& state)
{
    const auto& emb = shared_embeddings();
    auto q = emb.row(0);
    std::vector<float> query(q.begin(), q.end());
    for (auto _ : state) {
        benchmark::DoNotOptimize(knn(emb, query, 100, {}, mode(state)));
    }
}
BENCHMARK(BM_knn)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_greedy(benchmark::State& state)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> r(0.0, 1.0);
    SelectionProblem p;
    std::vector<std::string> labels;
    for (int i = 0; i < 20000; ++i) {
        p.candidates.push_back("c" + std::to_string(i));
        p.rewards.push_back(r(rng));
        labels.push_back("a" + std::to_string(rng() % 2000));
    }
    p.partition = Partition::from_labels(labels);
    p.budget = 100;
    for (auto _ : state) {
        QaiObjective f(p);
        benchmark::DoNotOptimize(greedy_select(p, f, mode(state)));
    }
}
BENCHMARK(BM_greedy)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
