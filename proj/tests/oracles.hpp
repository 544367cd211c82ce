// Independent brute-force oracles. Everything here recomputes results from
// first principles (adjacency matrices, exhaustive enumeration, direct
// formulas) so the library implementations are checked against a second
// route, not against themselves.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "spillnet/graph.hpp"
#include "spillnet/louvain.hpp"
#include "spillnet/panel.hpp"

namespace oracle {

inline Eigen::MatrixXd adjacency(const spillnet::DirectedGraph& g) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.size(), g.size());
    for (const auto& [u, v] : g.edges()) a(u, v) = 1.0;
    return a;
}

// O(n^2) all-pairs peak/trough scan.
inline double max_drawdown(const std::vector<double>& prices) {
    double worst = 0.0;
    for (size_t t = 0; t < prices.size(); ++t)
        for (size_t u = t; u < prices.size(); ++u)
            worst = std::max(worst, (prices[t] - prices[u]) / prices[t]);
    return worst;
}

inline double fold_left_sum(const std::vector<double>& xs) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
}

// Exhaustive shortest-path enumeration: BFS distances first, then DFS over
// paths of exactly that length, tallying interior nodes.
inline std::vector<double> betweenness(const spillnet::DirectedGraph& g) {
    const int n = static_cast<int>(g.size());
    std::vector<double> score(n, 0.0);

    auto bfs_dist = [&](int s) {
        std::vector<int> dist(n, -1);
        std::vector<int> queue{s};
        dist[s] = 0;
        for (size_t q = 0; q < queue.size(); ++q)
            for (int w : g.out_neighbors(queue[q]))
                if (dist[w] < 0) {
                    dist[w] = dist[queue[q]] + 1;
                    queue.push_back(w);
                }
        return dist;
    };

    for (int s = 0; s < n; ++s) {
        std::vector<int> dist = bfs_dist(s);
        for (int t = 0; t < n; ++t) {
            if (t == s || dist[t] < 0) continue;
            long total = 0;
            std::vector<long> via(n, 0);
            std::vector<int> path{s};
            // enumerate every path s -> t of length exactly dist[t]
            auto dfs = [&](auto&& self, int v) -> void {
                if (static_cast<int>(path.size()) - 1 == dist[t]) {
                    if (v == t) {
                        ++total;
                        for (size_t i = 1; i + 1 < path.size(); ++i) ++via[path[i]];
                    }
                    return;
                }
                for (int w : g.out_neighbors(v)) {
                    path.push_back(w);
                    self(self, w);
                    path.pop_back();
                }
            };
            dfs(dfs, s);
            for (int v = 0; v < n; ++v)
                if (total > 0 && v != s && v != t)
                    score[v] += static_cast<double>(via[v]) / static_cast<double>(total);
        }
    }
    return score;
}

// Triple loop over the symmetrized adjacency matrix.
inline std::vector<double> clustering(const spillnet::DirectedGraph& g) {
    const int n = static_cast<int>(g.size());
    Eigen::MatrixXd a = adjacency(g);
    Eigen::MatrixXd s = ((a + a.transpose()).array() > 0.0).cast<double>();
    std::vector<double> c(n, 0.0);
    for (int v = 0; v < n; ++v) {
        int deg = static_cast<int>(s.row(v).sum());
        if (deg < 2) continue;
        int tri = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (s(v, i) > 0 && s(v, j) > 0 && s(i, j) > 0) ++tri;
        c[v] = 2.0 * tri / (static_cast<double>(deg) * (deg - 1));
    }
    return c;
}

// Reachability via boolean matrix powers.
inline int m_reach(const spillnet::DirectedGraph& g, int node, int m, spillnet::Direction dir) {
    const int n = static_cast<int>(g.size());
    Eigen::MatrixXd a = adjacency(g);
    if (dir == spillnet::Direction::In) a.transposeInPlace();
    Eigen::VectorXd frontier = Eigen::VectorXd::Zero(n);
    frontier(node) = 1.0;
    std::set<int> reached;
    for (int k = 0; k < m; ++k) {
        frontier = ((a.transpose() * frontier).array() > 0.0).cast<double>();
        for (int v = 0; v < n; ++v)
            if (frontier(v) > 0.0) reached.insert(v);
    }
    reached.erase(node);
    return static_cast<int>(reached.size());
}

// Dense linear solve (I - a M^T) x = a M^T 1, M = A for in-Katz, A^T for out.
inline Eigen::VectorXd katz(const spillnet::DirectedGraph& g, double a, spillnet::Direction dir) {
    const int n = static_cast<int>(g.size());
    Eigen::MatrixXd adj = adjacency(g);
    Eigen::MatrixXd mt =
        dir == spillnet::Direction::In ? Eigen::MatrixXd(adj.transpose()) : adj;
    Eigen::VectorXd rhs = a * mt * Eigen::VectorXd::Ones(n);
    return (Eigen::MatrixXd::Identity(n, n) - a * mt).fullPivLu().solve(rhs);
}

// Staged frontiers through boolean per-snapshot matrices.
inline int temporal_m_reach(const spillnet::SnapshotSequence& snaps, size_t t, int node, int m,
                            spillnet::Direction dir) {
    const int n = static_cast<int>(snaps[t].size());
    Eigen::VectorXd frontier = Eigen::VectorXd::Zero(n);
    frontier(node) = 1.0;
    std::set<int> reached;
    for (int k = 1; k <= m; ++k) {
        Eigen::MatrixXd a = adjacency(snaps[t + k - 1]);
        if (dir == spillnet::Direction::In) a.transposeInPlace();
        frontier = ((a.transpose() * frontier).array() > 0.0).cast<double>();
        for (int v = 0; v < n; ++v)
            if (frontier(v) > 0.0) reached.insert(v);
    }
    reached.erase(node);
    return static_cast<int>(reached.size());
}

inline double entropy(const std::vector<std::string>& sectors) {
    std::map<std::string, int> counts;
    for (const auto& s : sectors) ++counts[s];
    double h = 0.0;
    for (const auto& [s, c] : counts) {
        double q = static_cast<double>(c) / sectors.size();
        h -= q * std::log(q);
    }
    return h;
}

// Brute-force double sum Q = (1/2m) sum_ij [A_ij - k_i k_j / 2m] d(c_i, c_j)
// on the symmetrized unweighted matrix.
inline double modularity(const spillnet::UndirectedGraph& g, const spillnet::Partition& part) {
    const int n = static_cast<int>(g.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int v = 0; v < n; ++v)
        for (int w : g.neighbors(v)) a(v, w) = 1.0;
    double two_m = a.sum();
    double q = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (part.community[i] == part.community[j])
                q += a(i, j) - a.row(i).sum() * a.row(j).sum() / two_m;
    return q / two_m;
}

// Per-edge tallies for the cross-community counts.
struct EdgeTally {
    int internal = 0;
    int out_crossing = 0;
    int in_crossing = 0;
};

inline EdgeTally tally(const spillnet::DirectedGraph& g, const spillnet::Partition& part,
                       int community) {
    EdgeTally t;
    Eigen::MatrixXd a = adjacency(g);
    for (int u = 0; u < static_cast<int>(g.size()); ++u)
        for (int v = 0; v < static_cast<int>(g.size()); ++v) {
            if (a(u, v) == 0.0) continue;
            bool ui = part.community[u] == community, vi = part.community[v] == community;
            if (ui && vi) ++t.internal;
            if (ui && !vi) ++t.out_crossing;
            if (!ui && vi) ++t.in_crossing;
        }
    return t;
}

// Row/column sums of the adjacency matrix.
inline int degree(const spillnet::DirectedGraph& g, int v, spillnet::Direction dir) {
    Eigen::MatrixXd a = adjacency(g);
    return static_cast<int>(dir == spillnet::Direction::Out ? a.row(v).sum() : a.col(v).sum());
}

inline double commitment(const spillnet::DirectedGraph& g, const spillnet::Partition& part, int v,
                         spillnet::Direction dir) {
    double own = degree(g, v, dir);
    double total = 0.0;
    for (int u = 0; u < static_cast<int>(g.size()); ++u)
        if (part.community[u] == part.community[v]) total += degree(g, u, dir);
    return total == 0.0 ? 0.0 : own / total;
}

// Textbook two-pass Pearson correlation.
inline double correlation(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = fold_left_sum(x) / x.size(), my = fold_left_sum(y) / y.size();
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

inline spillnet::DirectedGraph random_digraph(int n, double p, std::mt19937& rng) {
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back("N" + std::to_string(i));
    spillnet::DirectedGraph g(std::move(labels));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v && unif(rng) < p) g.add_edge(u, v);
    return g;
}

} // namespace oracle
