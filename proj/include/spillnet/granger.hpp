#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "spillnet/graph.hpp"
#include "spillnet/panel.hpp"

namespace spillnet {

/// OLS fit of the y-equation of a bivariate VAR(p): unrestricted on p lags of
/// y and p lags of x, restricted on p lags of y only.
struct VarFit {
    int lag = 0;          // p
    int sample_size = 0;  // effective T (series length minus p)
    Eigen::VectorXd coef; // unrestricted: [const, y lags 1..p, x lags 1..p]
    Eigen::VectorXd coef_se;
    double rss_unrestricted = 0.0;
    double rss_restricted = 0.0;

    /// Coefficient on the k-th x lag (k in 1..p) and its standard error.
    double x_lag_coef(int k) const { return coef(lag + k); }
    double x_lag_se(int k) const { return coef_se(lag + k); }
};

/// One pairwise Granger test: does source's past help predict target?
struct EdgeTest {
    int source = -1;
    int target = -1;
    double f_stat = 0.0;
    double p_value = 1.0;
};

/// Fit the y-equation of a bivariate VAR(p) by OLS. Series must be aligned
/// and gap-free with length >= 2p + 5; a rank-deficient regressor matrix
/// (e.g. a constant series) is a degenerate-fit error.
VarFit fit_bivariate_var(std::span<const double> x, std::span<const double> y, int lag);

/// F = ((RSS_r - RSS_u)/p) / (RSS_u/(T - 2p - 1)), p-value from F(p, T-2p-1).
EdgeTest granger_test(const VarFit& fit, int source = -1, int target = -1);

struct NetworkOptions {
    int lag = 1;
    double significance = 0.05;
    bool fdr = false; // Benjamini-Hochberg across the window's pair tests
};

/// A recovered network plus the evidence behind it. Pairs with missing data
/// (or a degenerate fit) inside the window are skipped, never imputed.
struct NetworkResult {
    DirectedGraph graph;
    std::vector<EdgeTest> edge_tests;             // tests for pairs that became edges
    std::vector<std::pair<int, int>> skipped;     // (source, target) pairs not testable
};

/// Edge j->i iff the j->i Granger test rejects at options.significance over
/// the window. Deterministic: ordered pairs are evaluated in index order.
NetworkResult build_network(const ReturnPanel& panel, const Date& start, const Date& end,
                            const NetworkOptions& options);

struct SnapshotsResult {
    SnapshotSequence snapshots;
    std::vector<NetworkResult> details;                 // aligned with snapshots
    std::vector<std::pair<size_t, size_t>> window_rows; // [first, first+count) per snapshot
};

/// Rolling windows [k*step, k*step + window_length) over the panel rows, one
/// snapshot each; all snapshots share the panel's firm set.
SnapshotsResult build_snapshots(const ReturnPanel& panel, size_t window_length, size_t step,
                                const NetworkOptions& options);

} // namespace spillnet
