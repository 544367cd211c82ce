#include "spillnet/graph.hpp"

#include <algorithm>
#include <set>

#include "spillnet/errors.hpp"

namespace spillnet {

namespace {

// Sorted insert; returns false if already present.
bool insert_unique(std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) return false;
    v.insert(it, x);
    return true;
}

bool contains(const std::vector<int>& v, int x) {
    return std::binary_search(v.begin(), v.end(), x);
}

} // namespace

bool UndirectedGraph::has_edge(int a, int b) const {
    if (a < 0 || b < 0 || a >= static_cast<int>(size()) || b >= static_cast<int>(size()))
        throw DataError("unknown node in undirected edge query");
    return contains(adj_[a], b);
}

void UndirectedGraph::add_edge(int a, int b) {
    if (a < 0 || b < 0 || a >= static_cast<int>(size()) || b >= static_cast<int>(size()))
        throw DataError("unknown node in undirected add_edge");
    if (a == b) return;
    if (insert_unique(adj_[a], b)) {
        insert_unique(adj_[b], a);
        ++n_edges_;
    }
}

DirectedGraph::DirectedGraph(std::vector<std::string> labels)
    : labels_(std::move(labels)), out_(labels_.size()), in_(labels_.size()) {
    std::set<std::string> seen;
    for (const auto& l : labels_)
        if (!seen.insert(l).second) throw DataError("duplicate node label '" + l + "'");
}

void DirectedGraph::check_node(int v) const {
    if (v < 0 || v >= static_cast<int>(size()))
        throw DataError("unknown node index " + std::to_string(v));
}

bool DirectedGraph::add_edge(int from, int to) {
    check_node(from);
    check_node(to);
    if (from == to) throw DataError("self-loop rejected at node " + labels_[from]);
    if (!insert_unique(out_[from], to)) return false;
    insert_unique(in_[to], from);
    ++n_edges_;
    return true;
}

bool DirectedGraph::has_edge(int from, int to) const {
    check_node(from);
    check_node(to);
    return contains(out_[from], to);
}

int DirectedGraph::degree(int v, Direction dir) const {
    check_node(v);
    return static_cast<int>(dir == Direction::Out ? out_[v].size() : in_[v].size());
}

DirectedGraph DirectedGraph::subgraph(const std::vector<int>& nodes) const {
    std::vector<int> keep = nodes;
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (int v : keep) check_node(v);

    std::vector<int> local(size(), -1);
    std::vector<std::string> labels;
    labels.reserve(keep.size());
    for (size_t i = 0; i < keep.size(); ++i) {
        local[keep[i]] = static_cast<int>(i);
        labels.push_back(labels_[keep[i]]);
    }
    DirectedGraph sub(std::move(labels));
    for (int v : keep)
        for (int w : out_[v])
            if (local[w] >= 0) sub.add_edge(local[v], local[w]);
    if (timestamp_) sub.set_timestamp(*timestamp_);
    return sub;
}

UndirectedGraph DirectedGraph::symmetrize() const {
    UndirectedGraph u(size());
    for (size_t v = 0; v < size(); ++v)
        for (int w : out_[v]) u.add_edge(static_cast<int>(v), w);
    return u;
}

std::vector<std::pair<int, int>> DirectedGraph::edges() const {
    std::vector<std::pair<int, int>> e;
    e.reserve(n_edges_);
    for (size_t v = 0; v < size(); ++v)
        for (int w : out_[v]) e.emplace_back(static_cast<int>(v), w);
    return e;
}

} // namespace spillnet
