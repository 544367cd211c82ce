#pragma once

#include <vector>

#include "spillnet/graph.hpp"

namespace spillnet {

/// node -> community id, ids dense 0..k-1, every community non-empty.
struct Partition {
    std::vector<int> community;

    int n_communities() const;
    std::vector<std::vector<int>> members() const; // node lists per community, ascending
    void validate(size_t n_nodes) const;           // throws DataError on a broken map

    /// Relabel ids densely by first appearance in node order.
    static Partition normalized(std::vector<int> raw);
};

/// Newman-Girvan modularity Q = sum_c [e_c/m - (d_c/2m)^2] on the undirected
/// view. Undefined (error) on edgeless graphs.
double modularity(const UndirectedGraph& graph, const Partition& partition);

struct LouvainResult {
    Partition partition;
    std::vector<double> phase_modularity; // Q on the original graph after each phase
    bool edgeless = false;                // degenerate all-singletons result
};

/// Louvain two-phase modularity maximization on the symmetrized, unweighted
/// view. Deterministic: sweep order is ascending node index and ties in the
/// gain are broken toward the lowest community id; the seed shuffles sweep
/// order only when shuffle is set. An edgeless graph yields singletons.
LouvainResult louvain(const DirectedGraph& graph, double resolution = 1.0, unsigned seed = 0,
                      bool shuffle = false);

/// Sizes per community id; sums to the node count.
std::vector<int> community_size(const Partition& partition);

} // namespace spillnet
