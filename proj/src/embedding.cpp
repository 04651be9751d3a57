#include "citegraph/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "binary_io.hpp"
#include "citegraph/error.hpp"

namespace citegraph {

namespace {

constexpr std::string_view embedding_magic = "CGEMB1";

double squared_norm(std::span<const float> v)
{
    double sum = 0.0;
    for (float x : v) {
        sum += static_cast<double>(x) * static_cast<double>(x);
    }
    return sum;
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim, std::vector<std::string> ids, std::vector<float> values)
    : m_dim(dim), m_ids(std::move(ids)), m_values(std::move(values))
{
    if (m_dim == 0) {
        throw DataError("embedding dimension must be positive");
    }
    if (m_values.size() != m_ids.size() * m_dim) {
        throw DataError("embedding matrix has " + std::to_string(m_values.size()) + " components, expected "
                        + std::to_string(m_ids.size()) + " rows of dimension " + std::to_string(m_dim));
    }
    m_rows.reserve(m_ids.size());
    for (std::size_t r = 0; r < m_ids.size(); ++r) {
        if (!m_rows.emplace(m_ids[r], r).second) {
            throw DataError("duplicate embedding id: " + m_ids[r]);
        }
        for (float x : row(r)) {
            if (!std::isfinite(x)) {
                throw DataError("non-finite embedding component for id " + m_ids[r]);
            }
        }
    }
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view id) const
{
    auto it = m_rows.find(std::string(id));
    if (it == m_rows.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::span<const float> EmbeddingMatrix::vector(std::string_view id) const
{
    auto r = find(id);
    if (!r) {
        throw DataError("no embedding for id " + std::string(id));
    }
    return row(*r);
}

EmbeddingMatrix EmbeddingMatrix::normalize() const
{
    std::vector<float> values(m_values.size());
    for (std::size_t r = 0; r < size(); ++r) {
        auto norm = std::sqrt(squared_norm(row(r)));
        if (norm == 0.0) {
            throw DataError("cannot normalize all-zero embedding for id " + m_ids[r]);
        }
        for (std::size_t c = 0; c < m_dim; ++c) {
            values[r * m_dim + c] = static_cast<float>(static_cast<double>(m_values[r * m_dim + c]) / norm);
        }
    }
    EmbeddingMatrix out(m_dim, m_ids, std::move(values));
    out.m_normalized = true;
    return out;
}

bool EmbeddingMatrix::operator==(const EmbeddingMatrix& other) const
{
    if (m_dim != other.m_dim || m_ids != other.m_ids || m_values.size() != other.m_values.size()) {
        return false;
    }
    // bitwise, so that -0.0f and 0.0f differ and round-trips are checked exactly
    for (std::size_t i = 0; i < m_values.size(); ++i) {
        if (std::bit_cast<std::uint32_t>(m_values[i]) != std::bit_cast<std::uint32_t>(other.m_values[i])) {
            return false;
        }
    }
    return true;
}

void EmbeddingMatrix::write(std::ostream& out) const
{
    using detail::write_le;
    if (m_ids.size() > std::numeric_limits<std::uint32_t>::max()
        || m_dim > std::numeric_limits<std::uint32_t>::max()) {
        throw DataError("embedding matrix too large for the CGEMB1 format");
    }
    detail::write_bytes(out, embedding_magic);
    write_le(out, static_cast<std::uint32_t>(m_ids.size()));
    write_le(out, static_cast<std::uint32_t>(m_dim));
    for (std::size_t r = 0; r < m_ids.size(); ++r) {
        if (m_ids[r].size() > std::numeric_limits<std::uint16_t>::max()) {
            throw DataError("embedding id too long: " + m_ids[r].substr(0, 64) + "...");
        }
        write_le(out, static_cast<std::uint16_t>(m_ids[r].size()));
        detail::write_bytes(out, m_ids[r]);
        for (float x : row(r)) {
            detail::write_f32(out, x);
        }
    }
    if (!out) {
        throw DataError("failed writing embeddings");
    }
}

EmbeddingMatrix EmbeddingMatrix::read(std::istream& in)
{
    using detail::read_le;
    detail::expect_magic(in, embedding_magic, "CGEMB1 embedding");
    auto count = read_le<std::uint32_t>(in, "row count");
    auto dim = read_le<std::uint32_t>(in, "dimension");
    if (dim == 0) {
        throw DataError("embedding dimension must be positive");
    }
    std::vector<std::string> ids;
    std::vector<float> values;
    ids.reserve(count);
    values.reserve(static_cast<std::size_t>(count) * dim);
    for (std::uint32_t r = 0; r < count; ++r) {
        auto len = read_le<std::uint16_t>(in, "id length");
        auto id = detail::read_bytes(in, len, "id");
        for (std::uint32_t c = 0; c < dim; ++c) {
            auto x = detail::read_f32(in, "components of " + id);
            if (!std::isfinite(x)) {
                throw DataError("non-finite embedding component for id " + id);
            }
            values.push_back(x);
        }
        ids.push_back(std::move(id));
    }
    // a row whose true dimension differs from the header leaves bytes behind or runs short
    detail::expect_eof(in, "CGEMB1 embedding (row dimension mismatch?)");
    return EmbeddingMatrix(dim, std::move(ids), std::move(values));
}

void EmbeddingMatrix::save(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write embedding file: " + path.string());
    }
    write(out);
}

EmbeddingMatrix EmbeddingMatrix::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read embedding file: " + path.string());
    }
    try {
        return read(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

double cosine(std::span<const float> a, std::span<const float> b)
{
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto x = static_cast<double>(a[i]);
        auto y = static_cast<double>(b[i]);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if (na == 0.0 || nb == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double cosine(const EmbeddingMatrix& emb, std::string_view a, std::string_view b)
{
    auto va = emb.vector(a);
    auto vb = emb.vector(b);
    auto value = cosine(va, vb);
    if (std::isnan(value)) {
        throw DataError("cosine undefined: zero vector for " + std::string(squared_norm(va) == 0.0 ? a : b));
    }
    return value;
}

std::vector<double> cosine_all(const EmbeddingMatrix& emb, std::span<const float> query, Exec exec)
{
    if (query.size() != emb.dim()) {
        throw DataError("query dimension " + std::to_string(query.size()) + " does not match embedding dimension "
                        + std::to_string(emb.dim()));
    }
    std::vector<double> out(emb.size());
    auto rows = static_cast<std::int64_t>(emb.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t r = 0; r < rows; ++r) {
            out[static_cast<std::size_t>(r)] = cosine(query, emb.row(static_cast<std::size_t>(r)));
        }
    } else {
        for (std::int64_t r = 0; r < rows; ++r) {
            out[static_cast<std::size_t>(r)] = cosine(query, emb.row(static_cast<std::size_t>(r)));
        }
    }
    return out;
}

std::vector<Neighbor> knn_masked(const EmbeddingMatrix& emb, std::span<const float> query, std::size_t k,
                                 std::span<const std::uint8_t> allowed, Exec exec)
{
    if (k == 0) {
        throw std::invalid_argument("knn: k must be at least 1");
    }
    if (allowed.size() != emb.size()) {
        throw std::invalid_argument("knn: mask size does not match the number of rows");
    }
    if (query.size() == emb.dim() && squared_norm(query) == 0.0) {
        throw DataError("knn: query vector is all zero");
    }
    auto scores = cosine_all(emb, query, exec);

    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < emb.size(); ++r) {
        if (allowed[r] && !std::isnan(scores[r])) {
            rows.push_back(r);
        }
    }
    auto take = std::min(k, rows.size());
    std::partial_sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(take), rows.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b]) {
                              return scores[a] > scores[b];
                          }
                          return emb.id(a) < emb.id(b);
                      });
    std::vector<Neighbor> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.push_back({emb.id(rows[i]), scores[rows[i]]});
    }
    return out;
}

std::vector<Neighbor> knn(const EmbeddingMatrix& emb, std::span<const float> query, std::size_t k,
                          const std::unordered_set<std::string>& exclude, Exec exec)
{
    std::vector<std::uint8_t> allowed(emb.size(), 1);
    for (std::size_t r = 0; r < emb.size(); ++r) {
        if (exclude.contains(emb.id(r))) {
            allowed[r] = 0;
        }
    }
    return knn_masked(emb, query, k, allowed, exec);
}

}  // namespace citegraph
