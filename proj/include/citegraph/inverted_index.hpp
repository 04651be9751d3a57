#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "citegraph/corpus.hpp"
#include "citegraph/exec.hpp"
#include "citegraph/tokenizer.hpp"

namespace citegraph {

struct Posting {
    std::uint32_t doc;  // position in the index's document table
    std::uint32_t tf;

    bool operator==(const Posting&) const = default;
};

/// Term -> postings over the title+abstract text of every document, plus the
/// collection statistics the TF-IDF and BM25 scores need.
///
/// Postings are sorted by document position; terms are kept in byte order so
/// iteration (and the on-disk layout) is deterministic.
class InvertedIndex {
  public:
    InvertedIndex() = default;

    /// Indexes query_text(doc) for every document. Throws DataError on an
    /// empty corpus.
    static InvertedIndex build(const Corpus& corpus, const Tokenizer& tokenizer = {});

    [[nodiscard]] std::size_t num_docs() const { return m_doc_ids.size(); }
    [[nodiscard]] std::size_t num_terms() const { return m_postings.size(); }
    [[nodiscard]] double avg_doc_length() const { return m_avg_doc_length; }
    [[nodiscard]] const Tokenizer& tokenizer() const { return m_tokenizer; }

    [[nodiscard]] const std::string& doc_id(std::size_t pos) const { return m_doc_ids[pos]; }
    [[nodiscard]] std::uint32_t doc_length(std::size_t pos) const { return m_doc_lengths[pos]; }
    [[nodiscard]] const std::vector<std::string>& doc_ids() const { return m_doc_ids; }
    [[nodiscard]] const std::vector<std::uint32_t>& doc_lengths() const { return m_doc_lengths; }
    [[nodiscard]] std::optional<std::size_t> find_doc(std::string_view id) const;

    /// Empty span for an unknown term.
    [[nodiscard]] std::span<const Posting> postings(std::string_view term) const;
    [[nodiscard]] std::size_t doc_freq(std::string_view term) const { return postings(term).size(); }
    /// Term frequency of `term` in the document at `pos`; 0 when absent.
    [[nodiscard]] std::uint32_t term_frequency(std::string_view term, std::size_t pos) const;

    [[nodiscard]] const std::map<std::string, std::vector<Posting>, std::less<>>& terms() const
    {
        return m_postings;
    }

    /// CGIX1 binary layout, little-endian throughout.
    void write(std::ostream& out) const;
    static InvertedIndex read(std::istream& in);
    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(const std::filesystem::path& path);

    bool operator==(const InvertedIndex& other) const;

  private:
    void finalize();

    Tokenizer m_tokenizer;
    std::vector<std::string> m_doc_ids;
    std::vector<std::uint32_t> m_doc_lengths;
    std::map<std::string, std::vector<Posting>, std::less<>> m_postings;
    std::unordered_map<std::string, std::size_t> m_doc_positions;
    double m_avg_doc_length = 0.0;
};

struct Bm25Params {
    double k = 1.2;
    double b = 0.75;

    /// Throws std::invalid_argument unless k > 0 and b in [0, 1].
    void validate() const;
};

enum class LexicalScorer { tfidf, bm25 };

/// "tfidf" / "bm25"; throws std::invalid_argument otherwise.
LexicalScorer parse_lexical_scorer(std::string_view name);
std::string_view to_string(LexicalScorer scorer);

/// Per-term summands. Natural log; docLength is the candidate's length.
inline double tfidf_term_weight(double tf, double doc_length, double num_docs, double doc_freq);
inline double bm25_term_weight(double tf, double doc_length, double avg_doc_length, double num_docs,
                               double doc_freq, const Bm25Params& params);

/// Sum over the unique query terms present in the document. Throws
/// DataError for an unknown doc id.
double tfidf_score(const InvertedIndex& index, std::string_view query, std::string_view doc_id);
double bm25_score(const InvertedIndex& index, std::string_view query, std::string_view doc_id,
                  const Bm25Params& params = {});

/// Scores of every indexed document for one query.
struct LexicalScores {
    std::vector<double> score;
    /// 1 if the document shares at least one term with the query.
    std::vector<std::uint8_t> matched;
};

/// Term-at-a-time accumulation over postings. `terms` must be sorted and
/// unique; the parallel path splits each posting list across threads, and
/// since every document appears at most once per list the summation order
/// (and so every bit of the result) matches the serial path.
LexicalScores score_all(const InvertedIndex& index, std::span<const std::string> terms,
                        LexicalScorer scorer, const Bm25Params& params = {},
                        Exec exec = Exec::parallel);

struct ScoredDoc {
    std::string id;
    double score;

    bool operator==(const ScoredDoc&) const = default;
};

/// Top-k documents. Matching documents come first ordered by score
/// descending then id ascending; documents sharing no term with the query
/// follow in id order (score 0) so the list can still be filled to k.
std::vector<ScoredDoc> rank_lexical(const InvertedIndex& index, std::string_view query,
                                    LexicalScorer scorer, std::size_t k,
                                    const Bm25Params& params = {},
                                    const std::unordered_set<std::string>& exclude = {},
                                    Exec exec = Exec::parallel);

// inline definitions

inline double tfidf_term_weight(double tf, double doc_length, double num_docs, double doc_freq)
{
    return std::sqrt(tf / doc_length) * std::log(num_docs / (doc_freq + 1.0));
}

inline double bm25_term_weight(double tf, double doc_length, double avg_doc_length, double num_docs,
                               double doc_freq, const Bm25Params& params)
{
    double saturation = tf * (params.k + 1.0)
                        / (tf + params.k * (1.0 - params.b + params.b * doc_length / avg_doc_length));
    return saturation * std::log((num_docs - doc_freq + 0.5) / (doc_freq + 0.5));
}

}  // namespace citegraph
