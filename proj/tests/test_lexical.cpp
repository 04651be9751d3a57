#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "citegraph/error.hpp"
#include "citegraph/inverted_index.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace citegraph;

namespace {

const std::vector<std::string> three_docs{"a b", "a c", "a d"};

}  // namespace

TEST(Tokenizer, AlphanumericRunsLowercased)
{
    Tokenizer tok;
    EXPECT_TRUE(tok.tokenize("").empty());
    EXPECT_EQ(tok.tokenize("Hello, World-2020!"), (std::vector<std::string>{"hello", "world", "2020"}));
    Tokenizer keep{false};
    EXPECT_EQ(keep.tokenize("BM25 Okapi"), (std::vector<std::string>{"BM25", "Okapi"}));
    EXPECT_EQ(tok.unique_terms("b a b"), (std::vector<std::string>{"a", "b"}));
}

TEST(BuildIndex, HandCountedStatistics)
{
    auto index = InvertedIndex::build(fixtures::corpus_of({"a b", "a c"}));
    EXPECT_EQ(index.doc_freq("a"), 2U);
    EXPECT_EQ(index.doc_freq("b"), 1U);
    EXPECT_EQ(index.doc_freq("zzz"), 0U);
    EXPECT_DOUBLE_EQ(index.avg_doc_length(), 2.0);
    EXPECT_EQ(index.num_docs(), 2U);
}

TEST(BuildIndex, SingleEmptyDocument)
{
    auto index = InvertedIndex::build(fixtures::corpus_of({""}));
    EXPECT_EQ(index.doc_length(0), 0U);
    EXPECT_EQ(index.num_terms(), 0U);
    EXPECT_EQ(tfidf_score(index, "a", "d0"), 0.0);
}

TEST(BuildIndex, EmptyCorpusRejected)
{
    EXPECT_THROW((void)InvertedIndex::build(Corpus{}), DataError);
}

TEST(BuildIndex, InvariantsOnRandomCorpus)
{
    std::mt19937_64 rng(3);
    auto texts = fixtures::random_texts(rng, 60, 25);
    auto corpus = fixtures::corpus_of(texts);
    auto index = InvertedIndex::build(corpus);
    EXPECT_EQ(index, InvertedIndex::build(corpus));

    std::vector<std::uint64_t> tf_sum(index.num_docs(), 0);
    for (const auto& [term, list] : index.terms()) {
        EXPECT_EQ(index.doc_freq(term), list.size());
        for (const auto& p : list) {
            tf_sum[p.doc] += p.tf;
        }
    }
    double total = 0;
    for (std::size_t d = 0; d < index.num_docs(); ++d) {
        EXPECT_EQ(tf_sum[d], index.doc_length(d));
        total += index.doc_length(d);
    }
    EXPECT_EQ(index.avg_doc_length(), total / static_cast<double>(index.num_docs()));
}

TEST(TfidfScore, HandWorkedFixture)
{
    auto index = InvertedIndex::build(fixtures::corpus_of(three_docs));
    // sqrt(1/2) * ln(3/2)
    EXPECT_NEAR(tfidf_score(index, "b", "d0"), 0.2867071274778196, 1e-12);
    // sqrt(1/2) * ln(3/4), docFreq + 1 = 4
    EXPECT_NEAR(tfidf_score(index, "a", "d0"), -0.20342194425645396, 1e-12);
    EXPECT_EQ(tfidf_score(index, "z", "d1"), 0.0);
    EXPECT_THROW((void)tfidf_score(index, "a", "nope"), DataError);
}

TEST(Bm25Score, HandWorkedFixture)
{
    auto index = InvertedIndex::build(fixtures::corpus_of(three_docs));
    // A = 2.2 / 2.2 = 1, B = ln(0.5 / 3.5)
    EXPECT_NEAR(bm25_score(index, "a", "d0"), -1.9459101490553135, 1e-12);
    // A = 1, B = ln((3 - 1 + 0.5) / (1 + 0.5))
    EXPECT_NEAR(bm25_score(index, "b", "d0"), 0.5108256237659907, 1e-12);
    EXPECT_EQ(bm25_score(index, "z", "d2"), 0.0);
    EXPECT_THROW((void)bm25_score(index, "a", "nope"), DataError);
    EXPECT_THROW((void)bm25_score(index, "a", "d0", {0.0, 0.75}), std::invalid_argument);
}

TEST(LexicalScore, RepeatedQueryTermsCountOnce)
{
    auto index = InvertedIndex::build(fixtures::corpus_of(three_docs));
    EXPECT_EQ(bm25_score(index, "b b b", "d0"), bm25_score(index, "b", "d0"));
    EXPECT_EQ(tfidf_score(index, "B b", "d0"), tfidf_score(index, "b", "d0"));
}

TEST(LexicalScore, MatchesNaiveRescanOnRandomCorpora)
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        auto texts = fixtures::random_texts(rng, 1 + rng() % 100, 1 + rng() % 30);
        auto index = InvertedIndex::build(fixtures::corpus_of(texts));
        oracle::NaiveLexical naive(texts);
        auto query = fixtures::random_texts(rng, 1, 30, 6).front();
        for (std::size_t d = 0; d < texts.size(); ++d) {
            auto id = "d" + std::to_string(d);
            ASSERT_NEAR(tfidf_score(index, query, id), naive.tfidf(query, d), 1e-9);
            ASSERT_NEAR(bm25_score(index, query, id), naive.bm25(query, d), 1e-9);
        }
    }
}

TEST(Bm25Score, ZeroBIgnoresDocumentLength)
{
    auto base = InvertedIndex::build(fixtures::corpus_of({"x y", "p q", "r s", "m n"}));
    auto padded = InvertedIndex::build(fixtures::corpus_of({"x y pad pad pad pad pad", "p q", "r s", "m n"}));
    Bm25Params no_length{1.2, 0.0};
    // doc_freq(x) and numDocs are unchanged, so only the length factor could move the score
    EXPECT_DOUBLE_EQ(bm25_score(base, "x", "d0", no_length), bm25_score(padded, "x", "d0", no_length));
    EXPECT_NE(bm25_score(base, "x", "d0"), bm25_score(padded, "x", "d0"));
}

TEST(Bm25Score, SaturatesMonotonicallyInTf)
{
    Bm25Params params;
    double previous = 0.0;
    for (int tf = 1; tf <= 50; ++tf) {
        // positive IDF: 1 of 10 documents
        double summand = bm25_term_weight(tf, 20, 15, 10, 1, params);
        EXPECT_GE(summand, previous);
        EXPECT_LT(summand, (params.k + 1) * std::log(9.5 / 1.5) + 1e-12);
        previous = summand;
    }
}

TEST(BuildIndex, AddingUnrelatedDocumentOnlyMovesNumDocs)
{
    auto before = InvertedIndex::build(fixtures::corpus_of({"a b", "b c"}));
    auto after = InvertedIndex::build(fixtures::corpus_of({"a b", "b c", "c d"}));
    EXPECT_EQ(before.doc_freq("a"), after.doc_freq("a"));
    EXPECT_EQ(after.num_docs(), before.num_docs() + 1);
}

TEST(RankLexical, SingletonAndTieBreak)
{
    auto index = InvertedIndex::build(fixtures::corpus_of({"apple pie", "banana split", "banana split"}));
    auto top = rank_lexical(index, "apple", LexicalScorer::bm25, 1);
    ASSERT_EQ(top.size(), 1U);
    EXPECT_EQ(top[0].id, "d0");

    auto tied = rank_lexical(index, "split", LexicalScorer::tfidf, 2);
    ASSERT_EQ(tied.size(), 2U);
    EXPECT_EQ(tied[0].score, tied[1].score);
    EXPECT_EQ(tied[0].id, "d1");
    EXPECT_EQ(tied[1].id, "d2");
    EXPECT_THROW((void)rank_lexical(index, "x", LexicalScorer::bm25, 0), std::invalid_argument);
}

TEST(RankLexical, MatchingDocumentsComeFirstEvenWithNegativeScores)
{
    // "a" is in 3 of 4 documents, so its BM25 IDF is negative
    auto index = InvertedIndex::build(fixtures::corpus_of({"a", "a x", "a y", "z"}));
    auto ranked = rank_lexical(index, "a", LexicalScorer::bm25, 4);
    ASSERT_EQ(ranked.size(), 4U);
    EXPECT_LT(ranked[0].score, 0.0);
    EXPECT_EQ(ranked[3].id, "d3");
    EXPECT_EQ(ranked[3].score, 0.0);
}

TEST(RankLexical, MatchesExhaustiveOracle)
{
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        auto texts = fixtures::random_texts(rng, 20, 8, 6);
        auto index = InvertedIndex::build(fixtures::corpus_of(texts));
        oracle::NaiveLexical naive(texts);
        auto query = fixtures::random_texts(rng, 1, 8, 4).front();
        for (auto scorer : {LexicalScorer::tfidf, LexicalScorer::bm25}) {
            std::vector<std::tuple<int, double, std::string>> all;
            for (std::size_t d = 0; d < texts.size(); ++d) {
                bool m = naive.matches(query, d);
                double s = scorer == LexicalScorer::tfidf ? naive.tfidf(query, d) : naive.bm25(query, d);
                all.emplace_back(m ? 0 : 1, m ? -s : 0.0, "d" + std::to_string(d));
            }
            std::sort(all.begin(), all.end());
            auto ranked = rank_lexical(index, query, scorer, 20);
            ASSERT_EQ(ranked.size(), 20U);
            for (std::size_t i = 0; i < ranked.size(); ++i) {
                EXPECT_EQ(ranked[i].id, std::get<2>(all[i])) << "rank " << i << " query " << query;
            }
        }
    }
}

TEST(RankLexical, ExcludesIds)
{
    auto index = InvertedIndex::build(fixtures::corpus_of({"a", "a", "b"}));
    auto ranked = rank_lexical(index, "a", LexicalScorer::bm25, 3, {}, {"d0"});
    ASSERT_EQ(ranked.size(), 2U);
    EXPECT_EQ(ranked[0].id, "d1");
}

TEST(ScoreAll, ParallelBitIdenticalToSerial)
{
    set_max_threads(4);
    std::mt19937_64 rng(5);
    auto texts = fixtures::random_texts(rng, 500, 40, 30);
    auto index = InvertedIndex::build(fixtures::corpus_of(texts));
    auto terms = index.tokenizer().unique_terms("t1 t2 t3 t5 t7 t11 t13");
    for (auto scorer : {LexicalScorer::tfidf, LexicalScorer::bm25}) {
        auto serial = score_all(index, terms, scorer, {}, Exec::serial);
        auto parallel = score_all(index, terms, scorer, {}, Exec::parallel);
        EXPECT_EQ(serial.score, parallel.score);
        EXPECT_EQ(serial.matched, parallel.matched);
        // and identical to the per-document path
        for (std::size_t d = 0; d < index.num_docs(); d += 37) {
            auto single = scorer == LexicalScorer::tfidf ? tfidf_score(index, "t1 t2 t3 t5 t7 t11 t13", index.doc_id(d))
                                                         : bm25_score(index, "t1 t2 t3 t5 t7 t11 t13", index.doc_id(d));
            EXPECT_EQ(single, serial.score[d]);
        }
    }
}

TEST(IndexFile, RoundTripIsBitExact)
{
    std::mt19937_64 rng(8);
    auto index = InvertedIndex::build(fixtures::corpus_of(fixtures::random_texts(rng, 50, 20)));
    std::stringstream first;
    index.write(first);
    auto bytes = first.str();
    EXPECT_EQ(bytes.substr(0, 5), "CGIX1");
    std::stringstream in(bytes);
    auto loaded = InvertedIndex::read(in);
    EXPECT_EQ(loaded, index);
    EXPECT_EQ(loaded.avg_doc_length(), index.avg_doc_length());
    std::stringstream second;
    loaded.write(second);
    EXPECT_EQ(second.str(), bytes);

    auto path = fixtures::temp_dir("index") / "idx.bin";
    index.save(path);
    EXPECT_EQ(InvertedIndex::load(path), index);
}

TEST(IndexFile, LittleEndianLayout)
{
    auto index = InvertedIndex::build(fixtures::corpus_of({"a"}));
    std::stringstream out;
    index.write(out);
    // magic, lowercase flag, u32 doc count = 1, u32 id length = 2, "d0", u32 length = 1
    std::string expected("CGIX1\x01\x01\x00\x00\x00\x02\x00\x00\x00"
                         "d0\x01\x00\x00\x00"
                         "\x01\x00\x00\x00\x01\x00\x00\x00"
                         "a\x01\x00\x00\x00\x00\x00\x00\x00\x01\x00\x00\x00",
                         5 + 1 + 4 + 4 + 2 + 4 + 4 + 4 + 1 + 4 + 8);
    EXPECT_EQ(out.str(), expected);
}

TEST(IndexFile, RejectsCorruptInput)
{
    std::stringstream bad_magic("CGIX2....");
    EXPECT_THROW((void)InvertedIndex::read(bad_magic), DataError);

    auto index = InvertedIndex::build(fixtures::corpus_of({"a b", "c"}));
    std::stringstream out;
    index.write(out);
    auto bytes = out.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    EXPECT_THROW((void)InvertedIndex::read(truncated), DataError);
    std::stringstream trailing(bytes + "x");
    EXPECT_THROW((void)InvertedIndex::read(trailing), DataError);
}
