#include "citegraph/corpus.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "citegraph/error.hpp"

namespace citegraph {

using nlohmann::json;

std::string query_text(const Document& doc)
{
    if (doc.title.empty()) {
        return doc.abstract;
    }
    if (doc.abstract.empty()) {
        return doc.title;
    }
    std::string text;
    text.reserve(doc.title.size() + 1 + doc.abstract.size());
    text += doc.title;
    text += ' ';
    text += doc.abstract;
    return text;
}

Corpus::Corpus(std::vector<Document> documents) : m_documents(std::move(documents))
{
    m_positions.reserve(m_documents.size());
    for (std::size_t pos = 0; pos < m_documents.size(); ++pos) {
        auto& doc = m_documents[pos];
        if (doc.id.empty()) {
            throw DataError("document at position " + std::to_string(pos) + " has an empty id");
        }
        if (doc.year < 1000 || doc.year > 9999) {
            throw DataError("document " + doc.id + ": year " + std::to_string(doc.year)
                            + " is not a 4-digit positive integer");
        }
        if (!m_positions.emplace(doc.id, pos).second) {
            throw DataError("duplicate document id: " + doc.id);
        }

        std::unordered_set<std::string> seen;
        std::vector<std::string> refs;
        refs.reserve(doc.references.size());
        for (auto& ref : doc.references) {
            if (ref == doc.id) {
                ++m_report.self_references_removed;
                continue;
            }
            if (!seen.insert(ref).second) {
                ++m_report.duplicate_references_removed;
                continue;
            }
            refs.push_back(std::move(ref));
        }
        doc.references = std::move(refs);
    }

    for (const auto& doc : m_documents) {
        if (doc.references.empty()) {
            m_report.empty_references.push_back(doc.id);
        }
        for (const auto& ref : doc.references) {
            if (!m_positions.contains(ref)) {
                m_report.dangling.emplace_back(doc.id, ref);
            }
        }
    }
}

std::optional<std::size_t> Corpus::find(std::string_view id) const
{
    // heterogeneous lookup on unordered_map needs a transparent hash; the copy is cheap
    auto it = m_positions.find(std::string(id));
    if (it == m_positions.end()) {
        return std::nullopt;
    }
    return it->second;
}

const Document& Corpus::at(std::string_view id) const
{
    auto pos = find(id);
    if (!pos) {
        throw DataError("unknown document id: " + std::string(id));
    }
    return m_documents[*pos];
}

std::vector<std::string> Corpus::resolvable_references(const Document& doc) const
{
    std::vector<std::string> out;
    for (const auto& ref : doc.references) {
        if (contains(ref)) {
            out.push_back(ref);
        }
    }
    return out;
}

namespace {

[[noreturn]] void malformed(std::size_t line_no, const std::string& what)
{
    throw DataError("malformed record at line " + std::to_string(line_no) + ": " + what);
}

std::string string_field(const json& record, const char* name, std::size_t line_no)
{
    auto it = record.find(name);
    if (it == record.end()) {
        malformed(line_no, std::string("missing field \"") + name + "\"");
    }
    if (!it->is_string()) {
        malformed(line_no, std::string("field \"") + name + "\" must be a string");
    }
    return it->get<std::string>();
}

std::vector<std::string> string_list_field(const json& record, const char* name, std::size_t line_no)
{
    auto it = record.find(name);
    if (it == record.end()) {
        malformed(line_no, std::string("missing field \"") + name + "\"");
    }
    if (!it->is_array()) {
        malformed(line_no, std::string("field \"") + name + "\" must be an array of strings");
    }
    std::vector<std::string> out;
    out.reserve(it->size());
    for (const auto& item : *it) {
        if (!item.is_string()) {
            malformed(line_no, std::string("field \"") + name + "\" must be an array of strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

}  // namespace

Document parse_document(std::string_view line, std::size_t line_no)
{
    json record;
    try {
        record = json::parse(line);
    } catch (const json::parse_error& e) {
        malformed(line_no, e.what());
    }
    if (!record.is_object()) {
        malformed(line_no, "expected a JSON object");
    }

    Document doc;
    doc.id = string_field(record, "id", line_no);
    doc.title = string_field(record, "title", line_no);
    doc.abstract = string_field(record, "abstract", line_no);
    doc.authors = string_list_field(record, "authors", line_no);
    doc.venue = string_field(record, "venue", line_no);
    doc.references = string_list_field(record, "references", line_no);

    auto year = record.find("year");
    if (year == record.end()) {
        malformed(line_no, "missing field \"year\"");
    }
    if (!year->is_number_integer()) {
        malformed(line_no, "field \"year\" must be an integer");
    }
    doc.year = year->get<int>();
    if (doc.id.empty()) {
        malformed(line_no, "empty id");
    }
    if (doc.year < 1000 || doc.year > 9999) {
        malformed(line_no, "year " + std::to_string(doc.year) + " is not a 4-digit positive integer");
    }
    return doc;
}

std::string to_jsonl(const Document& doc)
{
    // ordered_json keeps the documented field order
    nlohmann::ordered_json record;
    record["id"] = doc.id;
    record["title"] = doc.title;
    record["abstract"] = doc.abstract;
    record["authors"] = doc.authors;
    record["venue"] = doc.venue;
    record["year"] = doc.year;
    record["references"] = doc.references;
    return record.dump();
}

Corpus load_corpus(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot read corpus file: " + path.string());
    }
    std::vector<Document> docs;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto doc = parse_document(line, line_no);
        if (!ids.insert(doc.id).second) {
            throw DataError(path.string() + ": duplicate document id " + doc.id + " at line "
                            + std::to_string(line_no));
        }
        docs.push_back(std::move(doc));
    }
    if (in.bad()) {
        throw DataError("error while reading corpus file: " + path.string());
    }
    return Corpus(std::move(docs));
}

void SplitSpec::validate() const
{
    if (!(train_max_year < dev_year && dev_year < test_year)) {
        throw std::invalid_argument("split years must satisfy train_max_year < dev_year < test_year");
    }
}

SplitSpec parse_split_spec(std::string_view text)
{
    int values[3] = {};
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
        auto end = text.find(',', start);
        if ((i < 2) != (end != std::string_view::npos)) {
            throw std::invalid_argument("split must be three comma-separated years, got: "
                                        + std::string(text));
        }
        auto part = text.substr(start, end == std::string_view::npos ? text.size() - start : end - start);
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), values[i]);
        if (ec != std::errc{} || ptr != part.data() + part.size()) {
            throw std::invalid_argument("split must be three comma-separated years, got: "
                                        + std::string(text));
        }
        start = end + 1;
    }
    SplitSpec spec{values[0], values[1], values[2]};
    spec.validate();
    return spec;
}

CorpusSplit split_by_year(const Corpus& corpus, const SplitSpec& spec)
{
    spec.validate();
    std::vector<Document> train;
    std::vector<Document> dev;
    std::vector<Document> test;
    CorpusSplit split;
    for (const auto& doc : corpus.documents()) {
        if (doc.year <= spec.train_max_year) {
            train.push_back(doc);
            continue;
        }
        bool is_dev = doc.year == spec.dev_year;
        bool is_test = doc.year == spec.test_year;
        if (!is_dev && !is_test) {
            ++split.dropped;
            continue;
        }
        if (corpus.resolvable_references(doc).empty()) {
            ++split.excluded_no_references;
            continue;
        }
        (is_dev ? dev : test).push_back(doc);
    }
    split.train = Corpus(std::move(train));
    split.dev = Corpus(std::move(dev));
    split.test = Corpus(std::move(test));
    return split;
}

}  // namespace citegraph
