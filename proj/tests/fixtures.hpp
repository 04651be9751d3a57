#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "citegraph/corpus.hpp"
#include "citegraph/embedding.hpp"

namespace fixtures {

inline citegraph::Document doc(std::string id, std::string title, std::vector<std::string> refs = {},
                               int year = 2000, std::vector<std::string> authors = {}, std::string venue = "")
{
    citegraph::Document d;
    d.id = std::move(id);
    d.title = std::move(title);
    d.references = std::move(refs);
    d.year = year;
    d.authors = std::move(authors);
    d.venue = std::move(venue);
    return d;
}

/// One document per text, ids d0, d1, ...
inline citegraph::Corpus corpus_of(const std::vector<std::string>& texts)
{
    std::vector<citegraph::Document> docs;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        docs.push_back(doc("d" + std::to_string(i), texts[i]));
    }
    return citegraph::Corpus(std::move(docs));
}

inline std::vector<std::string> random_texts(std::mt19937_64& rng, std::size_t docs, std::size_t vocab,
                                             std::size_t max_len = 15)
{
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
    std::vector<std::string> texts;
    for (std::size_t d = 0; d < docs; ++d) {
        std::string t;
        auto n = len(rng);
        for (std::size_t i = 0; i < n; ++i) {
            t += "t" + std::to_string(word(rng)) + " ";
        }
        texts.push_back(t);
    }
    return texts;
}

/// Random DAG over nodes n0..n{count-1}: edges only from higher to lower index.
inline citegraph::Corpus random_dag(std::mt19937_64& rng, std::size_t count, double edge_prob,
                                    std::vector<std::pair<int, int>>* edges = nullptr)
{
    std::bernoulli_distribution coin(edge_prob);
    std::vector<citegraph::Document> docs;
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<std::string> refs;
        for (std::size_t j = 0; j < i; ++j) {
            if (coin(rng)) {
                refs.push_back("n" + std::to_string(j));
                if (edges) {
                    edges->emplace_back(static_cast<int>(i), static_cast<int>(j));
                }
            }
        }
        docs.push_back(doc("n" + std::to_string(i), "", refs));
    }
    return citegraph::Corpus(std::move(docs));
}

inline citegraph::EmbeddingMatrix random_embeddings(std::mt19937_64& rng, const std::vector<std::string>& ids,
                                                    std::size_t dim)
{
    std::normal_distribution<float> gauss;
    std::vector<float> values;
    for (std::size_t i = 0; i < ids.size() * dim; ++i) {
        values.push_back(gauss(rng));
    }
    return citegraph::EmbeddingMatrix(dim, ids, values);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("citegraph_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixtures
