#include "citegraph/citation_graph.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "citegraph/error.hpp"

namespace citegraph {

namespace {

void build_csr(std::size_t num_nodes, std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
               std::vector<std::size_t>& offsets, std::vector<std::uint32_t>& targets)
{
    std::sort(edges.begin(), edges.end());
    offsets.assign(num_nodes + 1, 0);
    targets.clear();
    targets.reserve(edges.size());
    for (const auto& [from, to] : edges) {
        ++offsets[from + 1];
        targets.push_back(to);
    }
    for (std::size_t i = 0; i < num_nodes; ++i) {
        offsets[i + 1] += offsets[i];
    }
}

}  // namespace

CitationGraph CitationGraph::build(const Corpus& corpus)
{
    CitationGraph graph;
    graph.m_ids.reserve(corpus.size());
    for (const auto& doc : corpus.documents()) {
        graph.m_ids.push_back(doc.id);
    }
    std::sort(graph.m_ids.begin(), graph.m_ids.end());
    graph.m_nodes.reserve(graph.m_ids.size());
    for (std::uint32_t n = 0; n < graph.m_ids.size(); ++n) {
        graph.m_nodes.emplace(graph.m_ids[n], n);
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& doc : corpus.documents()) {
        auto from = graph.m_nodes.at(doc.id);
        for (const auto& ref : doc.references) {
            auto it = graph.m_nodes.find(ref);
            if (it == graph.m_nodes.end() || it->second == from) {
                ++graph.m_skipped;
                continue;
            }
            edges.emplace_back(from, it->second);
        }
    }
    // Corpus already deduplicates references, so each pair appears once.
    graph.m_num_edges = edges.size();
    build_csr(graph.m_ids.size(), edges, graph.m_out_offsets, graph.m_out_targets);
    for (auto& [from, to] : edges) {
        std::swap(from, to);
    }
    build_csr(graph.m_ids.size(), edges, graph.m_in_offsets, graph.m_in_sources);
    return graph;
}

std::optional<std::uint32_t> CitationGraph::find(std::string_view id) const
{
    auto it = m_nodes.find(std::string(id));
    if (it == m_nodes.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::uint32_t CitationGraph::node(std::string_view id) const
{
    auto n = find(id);
    if (!n) {
        throw DataError("document not in citation graph: " + std::string(id));
    }
    return *n;
}

std::span<const std::uint32_t> CitationGraph::out_edges(std::uint32_t node) const
{
    return std::span(m_out_targets).subspan(m_out_offsets[node], m_out_offsets[node + 1] - m_out_offsets[node]);
}

std::span<const std::uint32_t> CitationGraph::in_edges(std::uint32_t node) const
{
    return std::span(m_in_sources).subspan(m_in_offsets[node], m_in_offsets[node + 1] - m_in_offsets[node]);
}

bool CitationGraph::has_edge(std::string_view from, std::string_view to) const
{
    auto a = find(from);
    auto b = find(to);
    if (!a || !b) {
        return false;
    }
    auto targets = out_edges(*a);
    return std::binary_search(targets.begin(), targets.end(), *b);
}

std::vector<int> CitationGraph::bfs_distances(std::uint32_t source, int max_depth, Direction direction) const
{
    std::vector<int> dist(num_nodes(), -1);
    dist[source] = 0;
    std::vector<std::uint32_t> frontier{source};
    std::vector<std::uint32_t> next;
    for (int depth = 1; depth <= max_depth && !frontier.empty(); ++depth) {
        next.clear();
        auto visit = [&](std::uint32_t v) {
            if (dist[v] < 0) {
                dist[v] = depth;
                next.push_back(v);
            }
        };
        for (auto u : frontier) {
            for (auto v : out_edges(u)) {
                visit(v);
            }
            if (direction == Direction::undirected) {
                for (auto v : in_edges(u)) {
                    visit(v);
                }
            }
        }
        std::sort(next.begin(), next.end());
        frontier.swap(next);
    }
    return dist;
}

void CitationGraph::write_edge_list(std::ostream& out) const
{
    for (std::uint32_t u = 0; u < num_nodes(); ++u) {
        for (auto v : out_edges(u)) {
            out << m_ids[u] << '\t' << m_ids[v] << '\n';
        }
    }
}

std::optional<int> distance_level(const CitationGraph& graph, std::string_view from, std::string_view to,
                                  int max_d, Direction direction)
{
    if (max_d < 1) {
        throw std::invalid_argument("distance_level: max_d must be at least 1");
    }
    auto source = graph.node(from);
    auto target = graph.node(to);
    if (source == target) {
        return 0;
    }
    auto dist = graph.bfs_distances(source, max_d, direction);
    if (dist[target] < 0) {
        return std::nullopt;
    }
    return dist[target];
}

double target_similarity(double theta, int distance)
{
    if (distance < 1) {
        throw std::invalid_argument("target_similarity: distance must be at least 1");
    }
    return std::pow(theta, distance - 1);
}

std::vector<PositiveExample> positives(const CitationGraph& graph, std::string_view query_id, int max_d,
                                       double theta, Direction direction)
{
    if (max_d < 1 || max_d > 3) {
        throw std::invalid_argument("positives: max_d must be 1, 2 or 3");
    }
    if (!(theta > 0.0 && theta < 1.0)) {
        throw std::invalid_argument("positives: theta must lie in (0, 1)");
    }
    auto source = graph.node(query_id);
    auto dist = graph.bfs_distances(source, max_d, direction);

    std::vector<PositiveExample> out;
    for (int d = 1; d <= max_d; ++d) {
        // node numbering is id order, so this yields (distance, id) order
        for (std::uint32_t v = 0; v < dist.size(); ++v) {
            if (dist[v] == d) {
                out.push_back({std::string(query_id), graph.id(v), d, target_similarity(theta, d)});
            }
        }
    }
    return out;
}

}  // namespace citegraph
