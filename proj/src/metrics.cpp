#include "spillnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "spillnet/errors.hpp"

namespace spillnet {

const std::string& level_tag(Level level) {
    static const std::string tags[] = {"GT", "LT", "AT", "new-GT", "new-AT"};
    return tags[static_cast<int>(level)];
}

Level parse_level(const std::string& tag) {
    for (Level l : {Level::GT, Level::LT, Level::AT, Level::NewGT, Level::NewAT})
        if (level_tag(l) == tag) return l;
    throw DataError("unknown metric level tag '" + tag + "'");
}

std::vector<double> betweenness(const DirectedGraph& graph) {
    const int n = static_cast<int>(graph.size());
    std::vector<double> score(n, 0.0);
    std::vector<int> dist(n), sigma(n);
    std::vector<double> delta(n);
    std::vector<std::vector<int>> pred(n);
    std::vector<int> order;
    order.reserve(n);

    for (int s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : pred) p.clear();
        order.clear();

        dist[s] = 0;
        sigma[s] = 1;
        std::deque<int> queue{s};
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            order.push_back(v);
            for (int w : graph.out_neighbors(v)) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    pred[w].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int w = *it;
            for (int v : pred[w])
                delta[v] += static_cast<double>(sigma[v]) / sigma[w] * (1.0 + delta[w]);
            if (w != s) score[w] += delta[w];
        }
    }
    return score;
}

std::vector<double> clustering(const DirectedGraph& graph) {
    UndirectedGraph sym = graph.symmetrize();
    std::vector<double> c(graph.size(), 0.0);
    for (size_t v = 0; v < graph.size(); ++v) {
        const auto& nb = sym.neighbors(static_cast<int>(v));
        size_t deg = nb.size();
        if (deg < 2) continue;
        int triangles = 0;
        for (size_t a = 0; a < deg; ++a)
            for (size_t b = a + 1; b < deg; ++b)
                if (sym.has_edge(nb[a], nb[b])) ++triangles;
        c[v] = 2.0 * triangles / (static_cast<double>(deg) * (deg - 1));
    }
    return c;
}

int m_reach(const DirectedGraph& graph, int node, int m, Direction direction) {
    if (m < 1) throw ConfigError("m-reach requires m >= 1");
    if (node < 0 || node >= static_cast<int>(graph.size())) throw DataError("unknown node");
    std::vector<char> seen(graph.size(), 0);
    seen[node] = 1;
    std::vector<int> frontier{node};
    int reached = 0;
    for (int hop = 0; hop < m && !frontier.empty(); ++hop) {
        std::vector<int> next;
        for (int v : frontier) {
            const auto& nb =
                direction == Direction::Out ? graph.out_neighbors(v) : graph.in_neighbors(v);
            for (int w : nb) {
                if (!seen[w]) {
                    seen[w] = 1;
                    next.push_back(w);
                    ++reached;
                }
            }
        }
        frontier = std::move(next);
    }
    return reached;
}

std::vector<double> katz(const DirectedGraph& graph, double attenuation, Direction direction) {
    const size_t n = graph.size();
    if (attenuation <= 0.0) throw ConfigError("katz attenuation must be positive");

    // Spectral-radius guard: the walk series diverges at a >= 1/rho(A).
    if (n > 0 && graph.edge_count() > 0) {
        Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
        for (const auto& [u, v] : graph.edges()) adj(u, v) = 1.0;
        double rho = Eigen::EigenSolver<Eigen::MatrixXd>(adj, false).eigenvalues().cwiseAbs().maxCoeff();
        if (rho > 0.0 && attenuation >= 1.0 / rho)
            throw NumericalError("katz attenuation " + std::to_string(attenuation) +
                                 " >= 1/spectral radius (" + std::to_string(1.0 / rho) +
                                 "): series diverges");
    }

    std::vector<double> x(n, 0.0), next(n, 0.0);
    const double tol = 1e-10;
    const int max_iter = 10000;
    for (int iter = 0; iter < max_iter; ++iter) {
        double change = 0.0;
        for (size_t v = 0; v < n; ++v) {
            const auto& nb = direction == Direction::In ? graph.in_neighbors(static_cast<int>(v))
                                                        : graph.out_neighbors(static_cast<int>(v));
            double acc = 0.0;
            for (int u : nb) acc += 1.0 + x[u];
            next[v] = attenuation * acc;
            change = std::max(change, std::abs(next[v] - x[v]));
        }
        x.swap(next);
        if (change < tol) return x;
    }
    throw NumericalError("katz fixed point did not converge within 10000 iterations");
}

int temporal_m_reach(const SnapshotSequence& snapshots, size_t t, int node, int m,
                     Direction direction) {
    if (m < 1) throw ConfigError("temporal m-reach requires m >= 1");
    if (t + static_cast<size_t>(m) - 1 >= snapshots.size())
        throw DataError("temporal " + std::to_string(m) + "-reach from snapshot " +
                        std::to_string(t) + " needs " + std::to_string(t + m) +
                        " snapshots, have " + std::to_string(snapshots.size()));
    const size_t n = snapshots[t].size();
    if (node < 0 || node >= static_cast<int>(n)) throw DataError("unknown node");

    // Hop k expands the previous frontier through snapshot t+k-1. Frontiers
    // are not pruned by earlier visits: a node re-reached later is expanded
    // again through the later snapshot. Counting is cumulative-distinct.
    std::set<int> frontier{node}, reached{node};
    for (int hop = 1; hop <= m; ++hop) {
        const DirectedGraph& g = snapshots[t + hop - 1];
        if (g.size() != n) throw DataError("snapshots do not share a node set");
        std::set<int> next;
        for (int v : frontier) {
            const auto& nb = direction == Direction::Out ? g.out_neighbors(v) : g.in_neighbors(v);
            next.insert(nb.begin(), nb.end());
        }
        reached.insert(next.begin(), next.end());
        frontier = std::move(next);
    }
    return static_cast<int>(reached.size()) - 1; // origin seeded reached, excluded here
}

double sectoral_entropy(const Partition& partition, const SectorMap& sectors,
                        const std::vector<std::string>& node_labels, int community) {
    if (community < 0 || community >= partition.n_communities())
        throw DataError("unknown community " + std::to_string(community));
    std::map<std::string, int> counts;
    int size = 0;
    for (size_t v = 0; v < partition.community.size(); ++v) {
        if (partition.community[v] != community) continue;
        const std::string* sector = sectors.find(node_labels.at(v));
        if (!sector) throw DataError("firm '" + node_labels.at(v) + "' has no sector label");
        ++counts[*sector];
        ++size;
    }
    if (size == 0) throw DataError("empty community");
    double h = 0.0;
    for (const auto& [sector, c] : counts) {
        double q = static_cast<double>(c) / size;
        if (q > 0.0) h -= q * std::log(q);
    }
    return h;
}

int inter_degree_count(const DirectedGraph& graph, const Partition& partition, int community,
                       Direction direction) {
    partition.validate(graph.size());
    if (community < 0 || community >= partition.n_communities())
        throw DataError("unknown community " + std::to_string(community));
    int count = 0;
    for (const auto& [u, v] : graph.edges()) {
        bool u_in = partition.community[u] == community;
        bool v_in = partition.community[v] == community;
        if (direction == Direction::Out ? (u_in && !v_in) : (v_in && !u_in)) ++count;
    }
    return count;
}

double inter_intra_degree(const DirectedGraph& graph, const Partition& partition, int community,
                          Direction direction, double cap, bool* capped) {
    if (capped) *capped = false;
    int inter = inter_degree_count(graph, partition, community, direction);
    int intra = 0;
    for (const auto& [u, v] : graph.edges())
        if (partition.community[u] == community && partition.community[v] == community) ++intra;
    if (intra == 0) {
        if (inter == 0) return 0.0;
        if (capped) *capped = true;
        return cap;
    }
    return static_cast<double>(inter) / intra;
}

double commitment_ratio(const DirectedGraph& graph, const Partition& partition, int node,
                        Direction direction) {
    partition.validate(graph.size());
    if (node < 0 || node >= static_cast<int>(graph.size())) throw DataError("unknown node");
    int own = graph.degree(node, direction);
    int total = 0;
    for (size_t v = 0; v < graph.size(); ++v)
        if (partition.community[v] == partition.community[node])
            total += graph.degree(static_cast<int>(v), direction);
    if (total == 0) return 0.0;
    return static_cast<double>(own) / total;
}

const MetricColumn* MetricTable::find(Level level, const std::string& name) const {
    for (const auto& c : columns)
        if (c.level == level && c.name == name) return &c;
    return nullptr;
}

namespace {

// The eight-metric catalog every level shares.
std::vector<MetricColumn> static_catalog(const DirectedGraph& g, Level level,
                                         const MetricParams& params) {
    const size_t n = g.size();
    std::vector<MetricColumn> cols;
    auto add = [&](const std::string& name, std::vector<double> values) {
        cols.push_back(MetricColumn{level, name, std::move(values)});
    };

    std::vector<double> in_deg(n), out_deg(n), reach(n), inv_reach(n);
    for (size_t v = 0; v < n; ++v) {
        in_deg[v] = g.degree(static_cast<int>(v), Direction::In);
        out_deg[v] = g.degree(static_cast<int>(v), Direction::Out);
        reach[v] = m_reach(g, static_cast<int>(v), params.reach_m, Direction::Out);
        inv_reach[v] = m_reach(g, static_cast<int>(v), params.reach_m, Direction::In);
    }
    add("in_degree", std::move(in_deg));
    add("out_degree", std::move(out_deg));
    add("betweenness", betweenness(g));
    add("clustering", clustering(g));
    add("m_reach", std::move(reach));
    add("inv_m_reach", std::move(inv_reach));
    add("in_katz", katz(g, params.katz_attenuation, Direction::In));
    add("out_katz", katz(g, params.katz_attenuation, Direction::Out));
    return cols;
}

} // namespace

std::vector<MetricColumn> compute_level(Level level, const DirectedGraph& graph,
                                        const Partition& partition,
                                        const SnapshotSequence& snapshots, size_t ref_snapshot,
                                        const SectorMap& sectors, const MetricParams& params,
                                        std::vector<std::string>* log) {
    const size_t n = graph.size();
    partition.validate(n);
    auto members = partition.members();

    switch (level) {
    case Level::GT:
        return static_catalog(graph, Level::GT, params);

    case Level::LT: {
        // Same catalog, but each firm sees only its community's subgraph.
        std::vector<MetricColumn> cols = static_catalog(graph, Level::LT, params);
        for (auto& c : cols) std::fill(c.values.begin(), c.values.end(), 0.0);
        for (const auto& group : members) {
            DirectedGraph sub = graph.subgraph(group); // group is ascending
            auto sub_cols = static_catalog(sub, Level::LT, params);
            for (size_t k = 0; k < cols.size(); ++k)
                for (size_t local = 0; local < group.size(); ++local)
                    cols[k].values[group[local]] = sub_cols[k].values[local];
        }
        return cols;
    }

    case Level::AT: {
        // Community means of the GT catalog, broadcast, plus community size.
        auto gt = static_catalog(graph, Level::AT, params);
        std::vector<MetricColumn> cols;
        for (const auto& g_col : gt) {
            MetricColumn c{Level::AT, g_col.name, std::vector<double>(n, 0.0)};
            for (const auto& group : members) {
                double mean = 0.0;
                for (int v : group) mean += g_col.values[v];
                mean /= static_cast<double>(group.size());
                for (int v : group) c.values[v] = mean;
            }
            cols.push_back(std::move(c));
        }
        MetricColumn size_col{Level::AT, "community_size", std::vector<double>(n, 0.0)};
        for (const auto& group : members)
            for (int v : group) size_col.values[v] = static_cast<double>(group.size());
        cols.push_back(std::move(size_col));
        return cols;
    }

    case Level::NewGT: {
        if (ref_snapshot >= snapshots.size() || snapshots[ref_snapshot].size() != n)
            throw DataError("reference snapshot inconsistent with the metric graph");
        std::vector<double> commit_in(n), commit_out(n), treach(n), tinv(n);
        for (size_t v = 0; v < n; ++v) {
            int iv = static_cast<int>(v);
            commit_in[v] = commitment_ratio(graph, partition, iv, Direction::In);
            commit_out[v] = commitment_ratio(graph, partition, iv, Direction::Out);
            treach[v] = temporal_m_reach(snapshots, ref_snapshot, iv, params.reach_m, Direction::Out);
            tinv[v] = temporal_m_reach(snapshots, ref_snapshot, iv, params.reach_m, Direction::In);
        }
        std::vector<MetricColumn> cols;
        cols.push_back({Level::NewGT, "commitment_in", std::move(commit_in)});
        cols.push_back({Level::NewGT, "commitment_out", std::move(commit_out)});
        cols.push_back({Level::NewGT, "temporal_m_reach", std::move(treach)});
        cols.push_back({Level::NewGT, "temporal_inv_m_reach", std::move(tinv)});
        return cols;
    }

    case Level::NewAT: {
        std::vector<double> entropy(n), inter_in(n), inter_out(n), ratio_in(n), ratio_out(n);
        for (int c = 0; c < partition.n_communities(); ++c) {
            double h = sectoral_entropy(partition, sectors, graph.labels(), c);
            double n_in = inter_degree_count(graph, partition, c, Direction::In);
            double n_out = inter_degree_count(graph, partition, c, Direction::Out);
            bool capped = false;
            double r_in = inter_intra_degree(graph, partition, c, Direction::In, params.ratio_cap, &capped);
            if (capped && log)
                log->push_back("inter_intra_in capped at " + std::to_string(params.ratio_cap) +
                               " for community " + std::to_string(c));
            double r_out = inter_intra_degree(graph, partition, c, Direction::Out, params.ratio_cap, &capped);
            if (capped && log)
                log->push_back("inter_intra_out capped at " + std::to_string(params.ratio_cap) +
                               " for community " + std::to_string(c));
            for (int v : members[c]) {
                entropy[v] = h;
                inter_in[v] = n_in;
                inter_out[v] = n_out;
                ratio_in[v] = r_in;
                ratio_out[v] = r_out;
            }
        }
        std::vector<MetricColumn> cols;
        cols.push_back({Level::NewAT, "sectoral_entropy", std::move(entropy)});
        cols.push_back({Level::NewAT, "inter_in_degree", std::move(inter_in)});
        cols.push_back({Level::NewAT, "inter_out_degree", std::move(inter_out)});
        cols.push_back({Level::NewAT, "inter_intra_in", std::move(ratio_in)});
        cols.push_back({Level::NewAT, "inter_intra_out", std::move(ratio_out)});
        return cols;
    }
    }
    throw ConfigError("unknown metric level");
}

MetricTable compute_metric_table(const DirectedGraph& graph, const Partition& partition,
                                 const SnapshotSequence& snapshots, size_t ref_snapshot,
                                 const SectorMap& sectors, const MetricParams& params,
                                 std::vector<std::string>* log) {
    MetricTable table;
    table.tickers = graph.labels();
    for (Level level : {Level::GT, Level::LT, Level::AT, Level::NewGT, Level::NewAT}) {
        auto cols = compute_level(level, graph, partition, snapshots, ref_snapshot, sectors, params, log);
        for (auto& c : cols) table.columns.push_back(std::move(c));
    }
    std::stable_sort(table.columns.begin(), table.columns.end(),
                     [](const MetricColumn& a, const MetricColumn& b) {
                         if (a.level != b.level) return static_cast<int>(a.level) < static_cast<int>(b.level);
                         return a.name < b.name;
                     });
    return table;
}

CorrelationResult correlation_matrix(const MetricTable& table) {
    const size_t n = table.tickers.size();
    if (n < 2) throw DataError("correlation needs at least 2 firms");
    const size_t p = table.columns.size();

    CorrelationResult result;
    result.names.reserve(p);
    Eigen::MatrixXd centered(n, p);
    std::vector<double> norm(p);
    std::vector<bool> flat(p, false);
    for (size_t j = 0; j < p; ++j) {
        const auto& col = table.columns[j];
        result.names.push_back(col.id());
        Eigen::Map<const Eigen::VectorXd> v(col.values.data(), n);
        centered.col(j) = v.array() - v.mean();
        norm[j] = centered.col(j).norm();
        if (norm[j] == 0.0) {
            flat[j] = true;
            result.zero_variance.push_back(col.id());
        }
    }

    result.matrix = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
    for (size_t j = 0; j < p; ++j) {
        result.matrix(j, j) = 1.0;
        for (size_t l = j + 1; l < p; ++l) {
            if (flat[j] || flat[l]) continue;
            double r = centered.col(j).dot(centered.col(l)) / (norm[j] * norm[l]);
            result.matrix(j, l) = r;
            result.matrix(l, j) = r;
        }
    }
    return result;
}

} // namespace spillnet
