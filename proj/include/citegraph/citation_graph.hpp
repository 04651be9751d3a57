#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "citegraph/corpus.hpp"

namespace citegraph {

/// Follow citations forward only, or treat every edge as bidirectional.
enum class Direction { forward, undirected };

/// Directed citation graph: an edge i -> j when document i cites document j.
/// Nodes are numbered in ascending id order and adjacency lists are sorted,
/// so every traversal is deterministic.
class CitationGraph {
  public:
    CitationGraph() = default;

    static CitationGraph build(const Corpus& corpus);

    [[nodiscard]] std::size_t num_nodes() const { return m_ids.size(); }
    [[nodiscard]] std::size_t num_edges() const { return m_num_edges; }
    /// References that did not resolve to a document in the corpus.
    [[nodiscard]] std::size_t skipped_references() const { return m_skipped; }

    [[nodiscard]] const std::string& id(std::uint32_t node) const { return m_ids[node]; }
    [[nodiscard]] const std::vector<std::string>& ids() const { return m_ids; }
    [[nodiscard]] std::optional<std::uint32_t> find(std::string_view id) const;
    /// Throws DataError naming the id when absent.
    [[nodiscard]] std::uint32_t node(std::string_view id) const;

    [[nodiscard]] std::span<const std::uint32_t> out_edges(std::uint32_t node) const;
    [[nodiscard]] std::span<const std::uint32_t> in_edges(std::uint32_t node) const;
    [[nodiscard]] bool has_edge(std::string_view from, std::string_view to) const;

    /// Hop counts from `source` to every node reachable within `max_depth`
    /// hops; -1 marks nodes that are farther or unreachable.
    [[nodiscard]] std::vector<int> bfs_distances(std::uint32_t source, int max_depth,
                                                 Direction direction = Direction::forward) const;

    /// "from<TAB>to" per line, sorted by (from, to).
    void write_edge_list(std::ostream& out) const;

  private:
    std::vector<std::string> m_ids;
    std::unordered_map<std::string, std::uint32_t> m_nodes;
    // CSR adjacency, both directions
    std::vector<std::size_t> m_out_offsets;
    std::vector<std::uint32_t> m_out_targets;
    std::vector<std::size_t> m_in_offsets;
    std::vector<std::uint32_t> m_in_sources;
    std::size_t m_num_edges = 0;
    std::size_t m_skipped = 0;
};

/// Shortest directed hop count from `from` to `to` if it is at most
/// `max_d`; 0 when from == to. A direct citation has distance 1.
std::optional<int> distance_level(const CitationGraph& graph, std::string_view from,
                                  std::string_view to, int max_d,
                                  Direction direction = Direction::forward);

struct PositiveExample {
    std::string query_id;
    std::string positive_id;
    int distance;
    double target_sim;

    bool operator==(const PositiveExample&) const = default;
};

/// theta^(distance - 1).
double target_similarity(double theta, int distance);

/// Every node at shortest distance 1..max_d from `query_id`, ordered by
/// (distance, id). max_d must be in {1, 2, 3} and theta in (0, 1).
std::vector<PositiveExample> positives(const CitationGraph& graph, std::string_view query_id,
                                       int max_d, double theta,
                                       Direction direction = Direction::forward);

}  // namespace citegraph
