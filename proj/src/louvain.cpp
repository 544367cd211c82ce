#include "spillnet/louvain.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "spillnet/errors.hpp"

namespace spillnet {

int Partition::n_communities() const {
    int k = 0;
    for (int c : community) k = std::max(k, c + 1);
    return k;
}

std::vector<std::vector<int>> Partition::members() const {
    std::vector<std::vector<int>> m(n_communities());
    for (size_t v = 0; v < community.size(); ++v) m[community[v]].push_back(static_cast<int>(v));
    return m;
}

void Partition::validate(size_t n_nodes) const {
    if (community.size() != n_nodes) throw DataError("partition does not cover the node set");
    int k = n_communities();
    std::vector<int> count(k, 0);
    for (int c : community) {
        if (c < 0) throw DataError("negative community id");
        ++count[c];
    }
    for (int c = 0; c < k; ++c)
        if (count[c] == 0) throw DataError("empty community id " + std::to_string(c));
}

Partition Partition::normalized(std::vector<int> raw) {
    std::map<int, int> relabel;
    Partition p;
    p.community.reserve(raw.size());
    for (int c : raw) {
        auto [it, inserted] = relabel.emplace(c, static_cast<int>(relabel.size()));
        p.community.push_back(it->second);
    }
    return p;
}

double modularity(const UndirectedGraph& graph, const Partition& partition) {
    partition.validate(graph.size());
    const double m = static_cast<double>(graph.edge_count());
    if (m == 0.0) throw DataError("modularity undefined on an edgeless graph");

    int k = partition.n_communities();
    std::vector<double> intra(k, 0.0), degree_sum(k, 0.0);
    for (size_t v = 0; v < graph.size(); ++v) {
        int cv = partition.community[v];
        degree_sum[cv] += static_cast<double>(graph.neighbors(static_cast<int>(v)).size());
        for (int w : graph.neighbors(static_cast<int>(v)))
            if (partition.community[w] == cv) intra[cv] += 0.5; // each edge seen twice
    }
    double q = 0.0;
    for (int c = 0; c < k; ++c) {
        double frac = degree_sum[c] / (2.0 * m);
        q += intra[c] / m - frac * frac;
    }
    return q;
}

namespace {

// Weighted undirected multigraph used across aggregation levels. self_weight
// holds 2x the collapsed internal weight so node degrees are preserved.
struct WeightedGraph {
    std::vector<std::vector<std::pair<int, double>>> adj;
    std::vector<double> self_weight;
    double total_weight = 0.0; // == 2m

    size_t size() const { return adj.size(); }
};

std::vector<int> local_move(const WeightedGraph& g, double resolution, std::vector<int> order) {
    const size_t n = g.size();
    std::vector<double> degree(n, 0.0);
    for (size_t v = 0; v < n; ++v) {
        degree[v] = g.self_weight[v];
        for (const auto& [w, wt] : g.adj[v]) {
            (void)w;
            degree[v] += wt;
        }
    }
    std::vector<int> comm(n);
    std::iota(comm.begin(), comm.end(), 0);
    std::vector<double> comm_total = degree;

    const double eps = 1e-12;
    bool moved = true;
    while (moved) {
        moved = false;
        for (int v : order) {
            int c0 = comm[v];
            // Weight from v into each adjacent community (self-loops excluded).
            std::map<int, double> into;
            into[c0]; // staying is always a candidate
            for (const auto& [w, wt] : g.adj[v]) into[comm[w]] += wt;

            comm_total[c0] -= degree[v];
            int best = c0;
            double best_gain = -std::numeric_limits<double>::infinity();
            for (const auto& [c, k_vc] : into) { // std::map: ascending ids, lowest wins ties
                double gain = k_vc - resolution * degree[v] * comm_total[c] / g.total_weight;
                if (gain > best_gain + eps) {
                    best_gain = gain;
                    best = c;
                }
            }
            comm_total[best] += degree[v];
            if (best != c0) {
                comm[v] = best;
                moved = true;
            }
        }
    }
    return comm;
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<int>& comm, int k) {
    WeightedGraph agg;
    agg.adj.resize(k);
    agg.self_weight.assign(k, 0.0);
    agg.total_weight = g.total_weight;
    std::vector<std::map<int, double>> weights(k);
    for (size_t v = 0; v < g.size(); ++v) {
        int cv = comm[v];
        agg.self_weight[cv] += g.self_weight[v];
        for (const auto& [w, wt] : g.adj[v]) {
            if (comm[w] == cv)
                agg.self_weight[cv] += wt; // internal edges visited from both ends
            else
                weights[cv][comm[w]] += wt;
        }
    }
    for (int c = 0; c < k; ++c)
        for (const auto& [d, wt] : weights[c]) agg.adj[c].emplace_back(d, wt);
    return agg;
}

} // namespace

LouvainResult louvain(const DirectedGraph& graph, double resolution, unsigned seed, bool shuffle) {
    if (graph.size() == 0) throw DataError("louvain on an empty graph");
    if (resolution <= 0.0) throw ConfigError("louvain resolution must be positive");

    UndirectedGraph sym = graph.symmetrize();
    LouvainResult result;
    if (sym.edge_count() == 0) {
        std::vector<int> singletons(graph.size());
        std::iota(singletons.begin(), singletons.end(), 0);
        result.partition = Partition{std::move(singletons)};
        result.edgeless = true;
        return result;
    }

    WeightedGraph level;
    level.adj.resize(sym.size());
    level.self_weight.assign(sym.size(), 0.0);
    for (size_t v = 0; v < sym.size(); ++v)
        for (int w : sym.neighbors(static_cast<int>(v))) level.adj[v].emplace_back(w, 1.0);
    level.total_weight = 2.0 * static_cast<double>(sym.edge_count());

    std::mt19937 rng(seed);
    std::vector<int> node_to_super(graph.size());
    std::iota(node_to_super.begin(), node_to_super.end(), 0);

    while (true) {
        std::vector<int> order(level.size());
        std::iota(order.begin(), order.end(), 0);
        if (shuffle) std::shuffle(order.begin(), order.end(), rng);

        std::vector<int> comm = local_move(level, resolution, std::move(order));
        Partition level_part = Partition::normalized(std::move(comm));
        int k = level_part.n_communities();

        for (auto& s : node_to_super) s = level_part.community[s];
        result.partition = Partition{node_to_super};
        result.phase_modularity.push_back(modularity(sym, result.partition));

        if (k == static_cast<int>(level.size())) break; // no merge: local optimum
        level = aggregate(level, level_part.community, k);
    }
    return result;
}

std::vector<int> community_size(const Partition& partition) {
    std::vector<int> sizes(partition.n_communities(), 0);
    for (int c : partition.community) ++sizes[c];
    return sizes;
}

} // namespace spillnet
