#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "spillnet/graph.hpp"
#include "spillnet/louvain.hpp"
#include "spillnet/panel.hpp"

namespace spillnet {

/// Metric levels: whole network per firm (GT), intra-community subgraph per
/// firm (LT), community means broadcast to members (AT), plus the novel
/// temporal / cross-community metrics (new-GT, new-AT).
enum class Level { GT, LT, AT, NewGT, NewAT };

const std::string& level_tag(Level level); // "GT", "LT", "AT", "new-GT", "new-AT"
Level parse_level(const std::string& tag);

/// Directed shortest-path betweenness (Brandes), unnormalized; unreachable
/// pairs contribute nothing.
std::vector<double> betweenness(const DirectedGraph& graph);

/// Triangle fraction c(v) = 2 T(v) / (deg(v) (deg(v)-1)) on the symmetrized
/// view; 0 when deg(v) < 2.
std::vector<double> clustering(const DirectedGraph& graph);

/// Distinct nodes (origin excluded) reachable within <= m hops following
/// out-edges (Out) or in-edges (In, the inverted variant).
int m_reach(const DirectedGraph& graph, int node, int m, Direction direction);

/// Katz centrality x = sum_{k>=1} a^k walks of length k ending at (In) or
/// starting from (Out) each node, by fixed-point iteration to 1e-10.
/// Requires attenuation < 1/spectral_radius(A), checked at runtime.
std::vector<double> katz(const DirectedGraph& graph, double attenuation, Direction direction);

/// m-reach where hop k uses snapshot t+k-1: frontiers are expanded through
/// successive networks and counted cumulatively (origin excluded).
int temporal_m_reach(const SnapshotSequence& snapshots, size_t t, int node, int m,
                     Direction direction);

/// Shannon entropy (natural log) of the sector distribution inside one
/// community; every member must carry a sector label.
double sectoral_entropy(const Partition& partition, const SectorMap& sectors,
                        const std::vector<std::string>& node_labels, int community);

/// Count of same-direction edges crossing the community boundary
/// (Out: member -> outside, In: outside -> member).
int inter_degree_count(const DirectedGraph& graph, const Partition& partition, int community,
                       Direction direction);

/// Boundary-crossing edges over internal edges for one community; 0/0 -> 0
/// and x/0 -> cap (flagged via *capped).
double inter_intra_degree(const DirectedGraph& graph, const Partition& partition, int community,
                          Direction direction, double cap = 1e6, bool* capped = nullptr);

/// Node's whole-graph degree over the summed same-direction degree of its
/// community members; 0/0 -> 0.
double commitment_ratio(const DirectedGraph& graph, const Partition& partition, int node,
                        Direction direction);

struct MetricColumn {
    Level level;
    std::string name;
    std::vector<double> values; // one per node

    std::string id() const { return level_tag(level) + "." + name; }
};

/// firm x metric table; AT columns are constant within communities, LT
/// columns come only from intra-community edges.
struct MetricTable {
    std::vector<std::string> tickers;
    std::vector<MetricColumn> columns;

    const MetricColumn* find(Level level, const std::string& name) const;
};

struct MetricParams {
    int reach_m = 2;              // "2-reach" everywhere in the catalog
    double katz_attenuation = 0.1;
    double ratio_cap = 1e6;
};

/// Columns of one level. The reference snapshot feeds the temporal metrics
/// (hop k uses snapshots[ref + k - 1]); graph should be snapshots[ref].
std::vector<MetricColumn> compute_level(Level level, const DirectedGraph& graph,
                                        const Partition& partition,
                                        const SnapshotSequence& snapshots, size_t ref_snapshot,
                                        const SectorMap& sectors, const MetricParams& params,
                                        std::vector<std::string>* log = nullptr);

/// Full table: all five levels, columns sorted by level then name, rows by
/// node index.
MetricTable compute_metric_table(const DirectedGraph& graph, const Partition& partition,
                                 const SnapshotSequence& snapshots, size_t ref_snapshot,
                                 const SectorMap& sectors, const MetricParams& params,
                                 std::vector<std::string>* log = nullptr);

struct CorrelationResult {
    std::vector<std::string> names; // column ids
    Eigen::MatrixXd matrix;         // NaN marks pairs involving a flat column
    std::vector<std::string> zero_variance;
};

/// Pearson correlations between metric columns; unit diagonal; zero-variance
/// columns produce missing markers and are reported.
CorrelationResult correlation_matrix(const MetricTable& table);

} // namespace spillnet
