#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spillnet/date.hpp"

namespace spillnet {

enum class Direction { In, Out };

/// Symmetrized, unweighted view of a DirectedGraph. Louvain and clustering
/// operate on this.
class UndirectedGraph {
public:
    UndirectedGraph() = default;
    explicit UndirectedGraph(size_t n) : adj_(n) {}

    size_t size() const { return adj_.size(); }
    size_t edge_count() const { return n_edges_; }
    const std::vector<int>& neighbors(int v) const { return adj_.at(v); }
    bool has_edge(int a, int b) const;
    void add_edge(int a, int b); // ignores duplicates and self-loops

private:
    std::vector<std::vector<int>> adj_; // sorted, unique
    size_t n_edges_ = 0;
};

/// Binary directed spillover graph. Nodes are dense indices 0..n-1 carrying
/// ticker labels; forward and reverse adjacency are both kept so in- and
/// out-queries are O(deg). Immutable in spirit: built once, then shared.
class DirectedGraph {
public:
    DirectedGraph() = default;
    explicit DirectedGraph(std::vector<std::string> labels);

    size_t size() const { return labels_.size(); }
    size_t edge_count() const { return n_edges_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(int v) const { return labels_.at(v); }

    /// Returns false if the edge already existed; throws on self-loops and
    /// out-of-range endpoints.
    bool add_edge(int from, int to);
    bool has_edge(int from, int to) const;

    const std::vector<int>& out_neighbors(int v) const { return out_.at(v); }
    const std::vector<int>& in_neighbors(int v) const { return in_.at(v); }

    int degree(int v, Direction dir) const;

    /// Induced subgraph on the given original node indices (deduplicated,
    /// kept in ascending original order; labels preserved, indices re-densed).
    DirectedGraph subgraph(const std::vector<int>& nodes) const;

    UndirectedGraph symmetrize() const;

    /// All edges as (from, to), ascending.
    std::vector<std::pair<int, int>> edges() const;

    const std::optional<Date>& timestamp() const { return timestamp_; }
    void set_timestamp(const Date& d) { timestamp_ = d; }

private:
    void check_node(int v) const;

    std::vector<std::string> labels_;
    std::vector<std::vector<int>> out_, in_; // sorted, unique
    size_t n_edges_ = 0;
    std::optional<Date> timestamp_;
};

/// Rolling-window network snapshots over a shared node set, timestamps
/// strictly increasing.
using SnapshotSequence = std::vector<DirectedGraph>;

} // namespace spillnet
