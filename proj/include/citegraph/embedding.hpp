#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "citegraph/exec.hpp"

namespace citegraph {

/// Row-major float32 document vectors keyed by id.
class EmbeddingMatrix {
  public:
    EmbeddingMatrix() = default;

    /// Throws DataError on dim == 0, a row-count mismatch, duplicate ids or
    /// non-finite components.
    EmbeddingMatrix(std::size_t dim, std::vector<std::string> ids, std::vector<float> values);

    [[nodiscard]] std::size_t dim() const { return m_dim; }
    [[nodiscard]] std::size_t size() const { return m_ids.size(); }
    [[nodiscard]] bool normalized() const { return m_normalized; }
    [[nodiscard]] const std::vector<std::string>& ids() const { return m_ids; }
    [[nodiscard]] const std::string& id(std::size_t row) const { return m_ids[row]; }
    [[nodiscard]] std::span<const float> row(std::size_t r) const
    {
        return std::span(m_values).subspan(r * m_dim, m_dim);
    }
    [[nodiscard]] std::span<const float> values() const { return m_values; }
    [[nodiscard]] std::optional<std::size_t> find(std::string_view id) const;
    /// Throws DataError naming the id when absent.
    [[nodiscard]] std::span<const float> vector(std::string_view id) const;

    /// Copy with every row scaled to unit L2 norm. Throws DataError naming
    /// the first all-zero row.
    [[nodiscard]] EmbeddingMatrix normalize() const;

    /// CGEMB1: magic, u32 count, u32 dim, then per row u16 id length, id
    /// bytes, dim x f32. Little-endian.
    void write(std::ostream& out) const;
    static EmbeddingMatrix read(std::istream& in);
    void save(const std::filesystem::path& path) const;
    static EmbeddingMatrix load(const std::filesystem::path& path);

    bool operator==(const EmbeddingMatrix& other) const;

  private:
    std::size_t m_dim = 0;
    std::vector<std::string> m_ids;
    std::vector<float> m_values;
    std::unordered_map<std::string, std::size_t> m_rows;
    bool m_normalized = false;
};

/// Double-accumulated cosine of two equal-length vectors; NaN if either is all zero.
double cosine(std::span<const float> a, std::span<const float> b);

/// Cosine between two stored rows. Throws DataError for an unknown id or a
/// zero vector.
double cosine(const EmbeddingMatrix& emb, std::string_view a, std::string_view b);

/// Cosine of `query` against every row; NaN for all-zero rows.
std::vector<double> cosine_all(const EmbeddingMatrix& emb, std::span<const float> query,
                               Exec exec = Exec::parallel);

struct Neighbor {
    std::string id;
    double cosine;

    bool operator==(const Neighbor&) const = default;
};

/// Exact top-k by cosine descending, ties by id ascending. Rows listed in
/// `exclude` and all-zero rows are skipped. Throws DataError when the query
/// dimension differs or the query is all zero.
std::vector<Neighbor> knn(const EmbeddingMatrix& emb, std::span<const float> query, std::size_t k,
                          const std::unordered_set<std::string>& exclude = {},
                          Exec exec = Exec::parallel);

/// Same ordering, restricted to the rows for which `allowed[row]` is set.
std::vector<Neighbor> knn_masked(const EmbeddingMatrix& emb, std::span<const float> query, std::size_t k,
                                 std::span<const std::uint8_t> allowed, Exec exec = Exec::parallel);

}  // namespace citegraph
