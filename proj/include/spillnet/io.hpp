#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "spillnet/granger.hpp"
#include "spillnet/graph.hpp"
#include "spillnet/louvain.hpp"
#include "spillnet/metrics.hpp"

namespace spillnet::io {

// Persisted stage interfaces. Every stage of the pipeline reads its inputs
// from these files, so each stage is independently rerunnable.

void write_nodes_csv(const std::string& path, const std::vector<std::string>& tickers);
std::vector<std::string> read_nodes_csv(const std::string& path);

/// `source,target,F,p_value`, tickers, one file per snapshot.
void write_edges_csv(const std::string& path, const DirectedGraph& graph,
                     const std::vector<EdgeTest>& edge_tests);
DirectedGraph read_edges_csv(const std::string& path, const std::vector<std::string>& tickers);

/// `ticker,community`
void write_partition_csv(const std::string& path, const std::vector<std::string>& tickers,
                         const Partition& partition);
Partition read_partition_csv(const std::string& path, const std::vector<std::string>& tickers);

/// `ticker,<level.metric>,...`
void write_metrics_csv(const std::string& path, const MetricTable& table);
MetricTable read_metrics_csv(const std::string& path);

/// Square matrix, header row/column of metric names, empty cells for flagged
/// (zero-variance) pairs.
void write_correlation_csv(const std::string& path, const CorrelationResult& correlation);

struct Targets {
    std::vector<std::string> tickers;
    std::vector<std::string> names; // depvar ids, e.g. cr_12m
    Eigen::MatrixXd values;         // firms x depvars
};

void write_targets_csv(const std::string& path, const Targets& targets);
Targets read_targets_csv(const std::string& path);

} // namespace spillnet::io
