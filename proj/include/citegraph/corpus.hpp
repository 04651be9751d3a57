#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace citegraph {

struct Document {
    std::string id;
    std::string title;
    std::string abstract;
    std::vector<std::string> authors;
    std::string venue;
    int year = 0;
    /// Outgoing citations. Deduplicated, never contains `id`.
    std::vector<std::string> references;

    bool operator==(const Document&) const = default;
};

/// Title and abstract joined by one space; an empty part contributes nothing.
std::string query_text(const Document& doc);

/// What was noticed (and tolerated) while building a corpus.
struct CorpusReport {
    /// (citing id, missing id) for every reference that does not resolve.
    std::vector<std::pair<std::string, std::string>> dangling;
    /// Documents whose reference list is empty.
    std::vector<std::string> empty_references;
    /// Repeated ids inside one reference list, removed on load.
    std::size_t duplicate_references_removed = 0;
    /// Self-citations, removed on load.
    std::size_t self_references_removed = 0;
};

/// Immutable ordered collection of documents with an id lookup.
class Corpus {
  public:
    Corpus() = default;

    /// Validates ids (non-empty, unique) and years, normalizes reference
    /// lists, and records dangling references. Throws DataError.
    explicit Corpus(std::vector<Document> documents);

    [[nodiscard]] std::size_t size() const { return m_documents.size(); }
    [[nodiscard]] bool empty() const { return m_documents.empty(); }
    [[nodiscard]] const std::vector<Document>& documents() const { return m_documents; }
    [[nodiscard]] const Document& operator[](std::size_t pos) const { return m_documents[pos]; }

    [[nodiscard]] std::optional<std::size_t> find(std::string_view id) const;
    [[nodiscard]] bool contains(std::string_view id) const { return find(id).has_value(); }
    /// Throws DataError naming the id when absent.
    [[nodiscard]] const Document& at(std::string_view id) const;

    [[nodiscard]] const CorpusReport& report() const { return m_report; }

    /// References of `doc` that resolve inside this corpus, in stored order.
    [[nodiscard]] std::vector<std::string> resolvable_references(const Document& doc) const;

  private:
    std::vector<Document> m_documents;
    std::unordered_map<std::string, std::size_t> m_positions;
    CorpusReport m_report;
};

/// Reads a JSON-lines corpus. Blank lines are skipped. Malformed records
/// are reported with their 1-based line number.
Corpus load_corpus(const std::filesystem::path& path);

/// Parses one JSONL record. `line_no` is only used in error messages.
Document parse_document(std::string_view line, std::size_t line_no = 0);

/// Serializes one document with the bit-exact field names of the corpus format.
std::string to_jsonl(const Document& doc);

struct SplitSpec {
    int train_max_year = 2010;
    int dev_year = 2011;
    int test_year = 2012;

    /// Throws std::invalid_argument unless train_max_year < dev_year < test_year.
    void validate() const;
};

/// Parses "2010,2011,2012".
SplitSpec parse_split_spec(std::string_view text);

struct CorpusSplit {
    Corpus train;
    Corpus dev;
    Corpus test;
    /// Years outside every bucket.
    std::size_t dropped = 0;
    /// Dev/test documents without a single reference resolvable in the source corpus.
    std::size_t excluded_no_references = 0;
};

CorpusSplit split_by_year(const Corpus& corpus, const SplitSpec& spec);

}  // namespace citegraph
