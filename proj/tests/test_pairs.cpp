#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "citegraph/error.hpp"
#include "citegraph/pairs.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace citegraph;
using fixtures::doc;

namespace {

// q cites a, b, c; six more documents are available as negatives
Corpus star()
{
    std::vector<Document> docs{doc("q", "", {"a", "b", "c"}), doc("a", ""), doc("b", ""), doc("c", "")};
    for (int i = 0; i < 6; ++i) {
        docs.push_back(doc("x" + std::to_string(i), ""));
    }
    return Corpus(std::move(docs));
}

std::vector<std::string> labelled(const PairSet& set, PairLabel label)
{
    std::vector<std::string> out;
    for (const auto& p : set.pairs) {
        if (p.label == label) {
            out.push_back(p.other_id);
        }
    }
    return out;
}

std::vector<float> as_vector(std::span<const float> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(GeneratePairs, OneNegativePerPositive)
{
    auto graph = CitationGraph::build(star());
    std::vector<std::string> queries{"q"};
    PairOptions options;
    options.seed = 7;
    auto set = generate_pairs(graph, nullptr, queries, options);
    auto pos = labelled(set, PairLabel::positive);
    auto neg = labelled(set, PairLabel::negative);
    EXPECT_EQ(pos, (std::vector<std::string>{"a", "b", "c"}));
    ASSERT_EQ(neg.size(), 3U);
    for (const auto& n : neg) {
        EXPECT_EQ(n.substr(0, 1), "x");
    }
    EXPECT_TRUE(set.shortfalls.empty());
    // positives come first within a query
    EXPECT_EQ(set.pairs[0].label, PairLabel::positive);
    EXPECT_EQ(set.pairs[0].target_sim, 1.0);
    EXPECT_EQ(set.pairs[3].target_sim, 0.0);
}

TEST(GeneratePairs, ShortfallWhenTooFewCandidates)
{
    // q cites three of four other documents; only one negative exists
    auto graph = CitationGraph::build(
        Corpus({doc("q", "", {"a", "b", "c"}), doc("a", ""), doc("b", ""), doc("c", ""), doc("d", "")}));
    std::vector<std::string> queries{"q"};
    auto set = generate_pairs(graph, nullptr, queries, {});
    EXPECT_EQ(labelled(set, PairLabel::negative), std::vector<std::string>{"d"});
    ASSERT_EQ(set.shortfalls.size(), 1U);
    EXPECT_EQ(set.shortfalls[0], (Shortfall{"q", 3, 1}));
}

TEST(GeneratePairs, NegativesDisjointFromPositivesAndQuery)
{
    std::mt19937_64 rng(13);
    auto corpus = fixtures::random_dag(rng, 60, 0.08);
    auto graph = CitationGraph::build(corpus);
    auto emb = fixtures::random_embeddings(rng, graph.ids(), 6);
    for (auto strategy : {NegativeStrategy::random, NegativeStrategy::nearest, NegativeStrategy::farthest}) {
        for (int d = 1; d <= 3; ++d) {
            PairOptions options;
            options.max_d = d;
            options.strategy = strategy;
            options.seed = 99;
            auto set = generate_pairs(graph, &emb, graph.ids(), options);
            std::map<std::string, std::set<std::string>> pos;
            for (const auto& p : set.pairs) {
                if (p.label == PairLabel::positive) {
                    pos[p.query_id].insert(p.other_id);
                }
            }
            for (const auto& p : set.pairs) {
                EXPECT_NE(p.query_id, p.other_id);
                if (p.label == PairLabel::negative) {
                    EXPECT_FALSE(pos[p.query_id].count(p.other_id)) << p.query_id << " " << p.other_id;
                    EXPECT_FALSE(distance_level(graph, p.query_id, p.other_id, d).has_value());
                }
            }
        }
    }
}

TEST(SelectNegatives, EmbeddingStrategiesMatchExhaustiveOracle)
{
    std::mt19937_64 rng(19);
    auto corpus = fixtures::random_dag(rng, 40, 0.1);
    auto graph = CitationGraph::build(corpus);
    auto emb = fixtures::random_embeddings(rng, graph.ids(), 5);
    for (const auto& q : graph.ids()) {
        std::vector<std::string> excluded;
        for (const auto& p : positives(graph, q, 2, 0.4)) {
            excluded.push_back(p.positive_id);
        }
        std::sort(excluded.begin(), excluded.end());
        std::vector<std::pair<long double, std::string>> all;
        for (const auto& id : graph.ids()) {
            if (id != q && !std::binary_search(excluded.begin(), excluded.end(), id)) {
                all.emplace_back(oracle::cosine(as_vector(emb.vector(q)), as_vector(emb.vector(id))), id);
            }
        }
        auto by = [&](bool nearest) {
            auto sorted = all;
            std::sort(sorted.begin(), sorted.end(), [&](const auto& a, const auto& b) {
                if (a.first != b.first) {
                    return nearest ? a.first > b.first : a.first < b.first;
                }
                return a.second < b.second;
            });
            std::vector<std::string> ids;
            for (std::size_t i = 0; i < std::min<std::size_t>(4, sorted.size()); ++i) {
                ids.push_back(sorted[i].second);
            }
            return ids;
        };
        EXPECT_EQ(select_negatives(graph, &emb, q, excluded, 4, NegativeStrategy::nearest, 0), by(true));
        EXPECT_EQ(select_negatives(graph, &emb, q, excluded, 4, NegativeStrategy::farthest, 0), by(false));
    }
}

TEST(SelectNegatives, EmbeddingStrategyNeedsVectors)
{
    auto graph = CitationGraph::build(star());
    std::vector<std::string> none;
    EXPECT_THROW((void)select_negatives(graph, nullptr, "q", none, 2, NegativeStrategy::nearest, 0), DataError);
    EmbeddingMatrix partial(1, {"a", "x0"}, {1.0F, 2.0F});
    EXPECT_THROW((void)select_negatives(graph, &partial, "q", none, 2, NegativeStrategy::nearest, 0), DataError);
    std::vector<std::string> queries{"q"};
    PairOptions options;
    options.strategy = NegativeStrategy::farthest;
    EXPECT_THROW((void)generate_pairs(graph, nullptr, queries, options), DataError);
}

TEST(SelectNegatives, RandomIsSeededAndUniformish)
{
    auto graph = CitationGraph::build(star());
    std::vector<std::string> excluded{"a", "b", "c"};
    auto first = select_negatives(graph, nullptr, "q", excluded, 3, NegativeStrategy::random, 5);
    EXPECT_EQ(first, select_negatives(graph, nullptr, "q", excluded, 3, NegativeStrategy::random, 5));
    std::map<std::string, int> hits;
    for (std::uint64_t seed = 0; seed < 600; ++seed) {
        for (const auto& id : select_negatives(graph, nullptr, "q", excluded, 1, NegativeStrategy::random, seed)) {
            ++hits[id];
        }
    }
    ASSERT_EQ(hits.size(), 6U);
    for (const auto& [id, n] : hits) {
        EXPECT_GT(n, 50) << id;
    }
}

TEST(GeneratePairs, ByteIdenticalAcrossRunsAndThreadCounts)
{
    std::mt19937_64 rng(23);
    auto corpus = fixtures::random_dag(rng, 120, 0.05);
    auto graph = CitationGraph::build(corpus);
    PairOptions options;
    options.seed = 1234;
    options.max_d = 2;
    auto dump = [&](Exec exec) {
        options.exec = exec;
        std::ostringstream out;
        write_pairs_jsonl(out, generate_pairs(graph, nullptr, graph.ids(), options), options);
        return out.str();
    };
    set_max_threads(4);
    auto serial = dump(Exec::serial);
    EXPECT_EQ(serial, dump(Exec::serial));
    EXPECT_EQ(serial, dump(Exec::parallel));
    options.seed = 1235;
    EXPECT_NE(serial, dump(Exec::serial));
}

TEST(GeneratePairs, JsonlFormat)
{
    auto graph = CitationGraph::build(Corpus({doc("q", "", {"a"}), doc("a", "", {"b"}), doc("b", ""), doc("z", "")}));
    std::vector<std::string> queries{"q"};
    PairOptions options;
    options.max_d = 2;
    options.seed = 3;
    std::ostringstream out;
    write_pairs_jsonl(out, generate_pairs(graph, nullptr, queries, options), options);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, R"({"seed":3,"strategy":"random","max_d":2,"theta":0.4})");
    std::getline(in, line);
    EXPECT_EQ(line, R"({"q":"q","d":"a","sim":1.0,"label":"pos"})");
    std::getline(in, line);
    EXPECT_EQ(line, R"({"q":"q","d":"b","sim":0.4,"label":"pos"})");
    std::getline(in, line);
    EXPECT_EQ(line, R"({"q":"q","d":"z","sim":0.0,"label":"neg"})");
    EXPECT_FALSE(std::getline(in, line));
}

TEST(GenerateTriplets, OnePerPositiveAndCrossProduct)
{
    auto graph = CitationGraph::build(star());
    std::vector<std::string> queries{"q"};
    PairOptions options;
    options.seed = 2;
    auto set = generate_triplets(graph, nullptr, queries, options);
    ASSERT_EQ(set.triplets.size(), 3U);
    std::set<std::string> negatives;
    for (const auto& t : set.triplets) {
        EXPECT_EQ(t.anchor_id, "q");
        EXPECT_EQ(t.negative_id.substr(0, 1), "x");
        negatives.insert(t.negative_id);
    }
    EXPECT_EQ(negatives.size(), 3U);

    options.cross_product = true;
    EXPECT_EQ(generate_triplets(graph, nullptr, queries, options).triplets.size(), 9U);

    std::ostringstream out;
    write_triplets_jsonl(out, set, options);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(nlohmann::json::parse(line)["strategy"], "random");
    std::getline(in, line);
    auto record = nlohmann::json::parse(line);
    EXPECT_EQ(record["q"], "q");
    EXPECT_EQ(record["pos"], "a");
    EXPECT_TRUE(record.contains("neg"));
}

TEST(GenerateTriplets, ReusesNegativesOnShortfall)
{
    auto graph = CitationGraph::build(
        Corpus({doc("q", "", {"a", "b", "c"}), doc("a", ""), doc("b", ""), doc("c", ""), doc("d", "")}));
    std::vector<std::string> queries{"q"};
    auto set = generate_triplets(graph, nullptr, queries, {});
    ASSERT_EQ(set.triplets.size(), 3U);
    for (const auto& t : set.triplets) {
        EXPECT_EQ(t.negative_id, "d");
    }
    EXPECT_EQ(set.shortfalls.size(), 1U);
}

TEST(TripletLoss, HandValues)
{
    EXPECT_EQ(triplet_loss(0.9, 0.1), 0.19999999999999996);
    EXPECT_NEAR(triplet_loss(0.9, 0.1), 0.2, 1e-12);
    EXPECT_EQ(triplet_loss(1.0, -1.0), 0.0);
    EXPECT_NEAR(triplet_loss(0.9, 0.2), 0.3, 1e-12);
    EXPECT_EQ(triplet_loss(-1.0, 1.0), 3.0);
}

TEST(NegativeStrategy, ParseRoundTrip)
{
    for (auto s : {NegativeStrategy::random, NegativeStrategy::nearest, NegativeStrategy::farthest}) {
        EXPECT_EQ(parse_negative_strategy(to_string(s)), s);
    }
    EXPECT_THROW((void)parse_negative_strategy("closest"), std::invalid_argument);
}
