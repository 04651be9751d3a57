#include "citegraph/inverted_index.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "binary_io.hpp"
#include "citegraph/error.hpp"

namespace citegraph {

namespace {

constexpr std::string_view index_magic = "CGIX1";

std::uint32_t checked_u32(std::size_t value, std::string_view what)
{
    if (value > std::numeric_limits<std::uint32_t>::max()) {
        throw DataError(std::string(what) + " does not fit the index format");
    }
    return static_cast<std::uint32_t>(value);
}

}  // namespace

InvertedIndex InvertedIndex::build(const Corpus& corpus, const Tokenizer& tokenizer)
{
    if (corpus.empty()) {
        throw DataError("cannot build an index over an empty corpus");
    }
    checked_u32(corpus.size(), "document count");

    InvertedIndex index;
    index.m_tokenizer = tokenizer;
    index.m_doc_ids.reserve(corpus.size());
    index.m_doc_lengths.reserve(corpus.size());

    std::map<std::string, std::uint32_t, std::less<>> counts;
    for (std::size_t pos = 0; pos < corpus.size(); ++pos) {
        const auto& doc = corpus[pos];
        auto tokens = tokenizer.tokenize(query_text(doc));
        index.m_doc_ids.push_back(doc.id);
        index.m_doc_lengths.push_back(checked_u32(tokens.size(), "document length"));

        counts.clear();
        for (auto& token : tokens) {
            ++counts[std::move(token)];
        }
        for (const auto& [term, tf] : counts) {
            // documents are visited in position order, so postings stay sorted
            index.m_postings[term].push_back({static_cast<std::uint32_t>(pos), tf});
        }
    }
    index.finalize();
    return index;
}

void InvertedIndex::finalize()
{
    m_doc_positions.clear();
    m_doc_positions.reserve(m_doc_ids.size());
    for (std::size_t pos = 0; pos < m_doc_ids.size(); ++pos) {
        if (!m_doc_positions.emplace(m_doc_ids[pos], pos).second) {
            throw DataError("duplicate document id in index: " + m_doc_ids[pos]);
        }
    }
    auto total = std::accumulate(m_doc_lengths.begin(), m_doc_lengths.end(), std::uint64_t{0});
    m_avg_doc_length = m_doc_lengths.empty()
                           ? 0.0
                           : static_cast<double>(total) / static_cast<double>(m_doc_lengths.size());
}

std::optional<std::size_t> InvertedIndex::find_doc(std::string_view id) const
{
    auto it = m_doc_positions.find(std::string(id));
    if (it == m_doc_positions.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::span<const Posting> InvertedIndex::postings(std::string_view term) const
{
    auto it = m_postings.find(term);
    if (it == m_postings.end()) {
        return {};
    }
    return it->second;
}

std::uint32_t InvertedIndex::term_frequency(std::string_view term, std::size_t pos) const
{
    auto list = postings(term);
    auto it = std::lower_bound(list.begin(), list.end(), pos,
                               [](const Posting& p, std::size_t doc) { return p.doc < doc; });
    if (it == list.end() || it->doc != pos) {
        return 0;
    }
    return it->tf;
}

bool InvertedIndex::operator==(const InvertedIndex& other) const
{
    return m_tokenizer == other.m_tokenizer && m_doc_ids == other.m_doc_ids
           && m_doc_lengths == other.m_doc_lengths && m_postings == other.m_postings;
}

void InvertedIndex::write(std::ostream& out) const
{
    using detail::write_bytes;
    using detail::write_le;
    write_bytes(out, index_magic);
    write_le<std::uint8_t>(out, m_tokenizer.lowercase ? 1 : 0);
    write_le(out, checked_u32(m_doc_ids.size(), "document count"));
    for (std::size_t pos = 0; pos < m_doc_ids.size(); ++pos) {
        write_le(out, checked_u32(m_doc_ids[pos].size(), "document id length"));
        write_bytes(out, m_doc_ids[pos]);
        write_le(out, m_doc_lengths[pos]);
    }
    write_le(out, checked_u32(m_postings.size(), "term count"));
    for (const auto& [term, list] : m_postings) {
        write_le(out, checked_u32(term.size(), "term length"));
        write_bytes(out, term);
        write_le(out, checked_u32(list.size(), "posting count"));
        for (const auto& p : list) {
            write_le(out, p.doc);
            write_le(out, p.tf);
        }
    }
    if (!out) {
        throw DataError("failed writing index");
    }
}

InvertedIndex InvertedIndex::read(std::istream& in)
{
    using detail::read_bytes;
    using detail::read_le;
    detail::expect_magic(in, index_magic, "CGIX1 index");

    InvertedIndex index;
    auto flag = read_le<std::uint8_t>(in, "tokenizer flags");
    if (flag > 1) {
        throw DataError("index: unknown tokenizer flag value " + std::to_string(flag));
    }
    index.m_tokenizer.lowercase = flag == 1;

    auto num_docs = read_le<std::uint32_t>(in, "document count");
    index.m_doc_ids.reserve(num_docs);
    index.m_doc_lengths.reserve(num_docs);
    for (std::uint32_t pos = 0; pos < num_docs; ++pos) {
        auto len = read_le<std::uint32_t>(in, "document id length");
        index.m_doc_ids.push_back(read_bytes(in, len, "document id"));
        index.m_doc_lengths.push_back(read_le<std::uint32_t>(in, "document length"));
    }

    std::vector<std::uint64_t> tf_sums(num_docs, 0);
    auto num_terms = read_le<std::uint32_t>(in, "term count");
    const std::string* previous = nullptr;
    for (std::uint32_t t = 0; t < num_terms; ++t) {
        auto len = read_le<std::uint32_t>(in, "term length");
        auto term = read_bytes(in, len, "term");
        auto count = read_le<std::uint32_t>(in, "posting count");
        if (count == 0) {
            throw DataError("index: term \"" + term + "\" has no postings");
        }
        if (previous != nullptr && !(*previous < term)) {
            throw DataError("index: terms out of order at \"" + term + "\"");
        }
        std::vector<Posting> list;
        list.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) {
            Posting p{read_le<std::uint32_t>(in, "posting"), read_le<std::uint32_t>(in, "posting")};
            if (p.doc >= num_docs || p.tf == 0 || (!list.empty() && list.back().doc >= p.doc)) {
                throw DataError("index: invalid posting list for term \"" + term + "\"");
            }
            tf_sums[p.doc] += p.tf;
            list.push_back(p);
        }
        auto [it, inserted] = index.m_postings.emplace(std::move(term), std::move(list));
        previous = &it->first;
    }
    detail::expect_eof(in, "CGIX1 index");

    for (std::uint32_t pos = 0; pos < num_docs; ++pos) {
        if (tf_sums[pos] != index.m_doc_lengths[pos]) {
            throw DataError("index: term frequencies of document " + index.m_doc_ids[pos]
                            + " do not sum to its length");
        }
    }
    index.finalize();
    return index;
}

void InvertedIndex::save(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write index file: " + path.string());
    }
    write(out);
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read index file: " + path.string());
    }
    try {
        return read(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void Bm25Params::validate() const
{
    if (!(k > 0.0)) {
        throw std::invalid_argument("BM25 k must be positive");
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw std::invalid_argument("BM25 b must lie in [0, 1]");
    }
}

LexicalScorer parse_lexical_scorer(std::string_view name)
{
    if (name == "tfidf") {
        return LexicalScorer::tfidf;
    }
    if (name == "bm25") {
        return LexicalScorer::bm25;
    }
    throw std::invalid_argument("unknown lexical scorer: " + std::string(name));
}

std::string_view to_string(LexicalScorer scorer)
{
    return scorer == LexicalScorer::tfidf ? "tfidf" : "bm25";
}

namespace {

std::size_t require_doc(const InvertedIndex& index, std::string_view doc_id)
{
    auto pos = index.find_doc(doc_id);
    if (!pos) {
        throw DataError("document not in index: " + std::string(doc_id));
    }
    return *pos;
}

double term_weight(const InvertedIndex& index, LexicalScorer scorer, const Bm25Params& params,
                   std::uint32_t tf, std::uint32_t doc_length, std::size_t doc_freq)
{
    auto n = static_cast<double>(index.num_docs());
    auto df = static_cast<double>(doc_freq);
    if (scorer == LexicalScorer::tfidf) {
        return tfidf_term_weight(tf, doc_length, n, df);
    }
    return bm25_term_weight(tf, doc_length, index.avg_doc_length(), n, df, params);
}

double score_one(const InvertedIndex& index, std::string_view query, std::string_view doc_id,
                 LexicalScorer scorer, const Bm25Params& params)
{
    auto pos = require_doc(index, doc_id);
    double score = 0.0;
    for (const auto& term : index.tokenizer().unique_terms(query)) {
        auto tf = index.term_frequency(term, pos);
        if (tf == 0) {
            continue;
        }
        score += term_weight(index, scorer, params, tf, index.doc_length(pos), index.doc_freq(term));
    }
    return score;
}

}  // namespace

double tfidf_score(const InvertedIndex& index, std::string_view query, std::string_view doc_id)
{
    return score_one(index, query, doc_id, LexicalScorer::tfidf, {});
}

double bm25_score(const InvertedIndex& index, std::string_view query, std::string_view doc_id,
                  const Bm25Params& params)
{
    params.validate();
    return score_one(index, query, doc_id, LexicalScorer::bm25, params);
}

LexicalScores score_all(const InvertedIndex& index, std::span<const std::string> terms,
                        LexicalScorer scorer, const Bm25Params& params, Exec exec)
{
    if (scorer == LexicalScorer::bm25) {
        params.validate();
    }
    LexicalScores out;
    out.score.assign(index.num_docs(), 0.0);
    out.matched.assign(index.num_docs(), 0);

    for (const auto& term : terms) {
        auto list = index.postings(term);
        auto count = static_cast<std::int64_t>(list.size());
        auto df = list.size();
        if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
            for (std::int64_t i = 0; i < count; ++i) {
                const auto& p = list[static_cast<std::size_t>(i)];
                out.score[p.doc] += term_weight(index, scorer, params, p.tf, index.doc_length(p.doc), df);
                out.matched[p.doc] = 1;
            }
        } else {
            for (const auto& p : list) {
                out.score[p.doc] += term_weight(index, scorer, params, p.tf, index.doc_length(p.doc), df);
                out.matched[p.doc] = 1;
            }
        }
    }
    return out;
}

std::vector<ScoredDoc> rank_lexical(const InvertedIndex& index, std::string_view query,
                                    LexicalScorer scorer, std::size_t k, const Bm25Params& params,
                                    const std::unordered_set<std::string>& exclude, Exec exec)
{
    if (k == 0) {
        throw std::invalid_argument("rank_lexical: k must be at least 1");
    }
    auto terms = index.tokenizer().unique_terms(query);
    auto scores = score_all(index, terms, scorer, params, exec);

    std::vector<std::uint32_t> order;
    order.reserve(index.num_docs());
    for (std::size_t pos = 0; pos < index.num_docs(); ++pos) {
        if (exclude.empty() || !exclude.contains(index.doc_id(pos))) {
            order.push_back(static_cast<std::uint32_t>(pos));
        }
    }
    auto before = [&](std::uint32_t a, std::uint32_t b) {
        if (scores.matched[a] != scores.matched[b]) {
            return scores.matched[a] > scores.matched[b];
        }
        if (scores.matched[a] && scores.score[a] != scores.score[b]) {
            return scores.score[a] > scores.score[b];
        }
        return index.doc_id(a) < index.doc_id(b);
    };
    auto take = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), before);

    std::vector<ScoredDoc> ranked;
    ranked.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        auto pos = order[i];
        ranked.push_back({index.doc_id(pos), scores.matched[pos] ? scores.score[pos] : 0.0});
    }
    return ranked;
}

}  // namespace citegraph
