#include "spillnet/granger.hpp"

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <optional>

#include "spillnet/errors.hpp"

namespace spillnet {

namespace {

struct Ols {
    Eigen::VectorXd beta;
    double rss;
    Eigen::MatrixXd xtx_inv;
};

Ols solve_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols())
        throw NumericalError("degenerate fit: regressor matrix is rank-deficient "
                             "(constant or collinear series)");
    Ols out;
    out.beta = qr.solve(response);
    out.rss = (response - design * out.beta).squaredNorm();
    Eigen::MatrixXd xtx = design.transpose() * design;
    out.xtx_inv = xtx.ldlt().solve(Eigen::MatrixXd::Identity(design.cols(), design.cols()));
    return out;
}

} // namespace

VarFit fit_bivariate_var(std::span<const double> x, std::span<const double> y, int lag) {
    if (lag < 1) throw ConfigError("lag order must be >= 1");
    if (x.size() != y.size()) throw DataError("series must be aligned");
    const int total = static_cast<int>(y.size());
    if (total < 2 * lag + 5)
        throw DataError("series length " + std::to_string(total) + " below minimum " +
                        std::to_string(2 * lag + 5) + " for lag " + std::to_string(lag));

    const int t_eff = total - lag;
    const int k_unrestricted = 1 + 2 * lag;
    Eigen::VectorXd response(t_eff);
    Eigen::MatrixXd unrestricted(t_eff, k_unrestricted);
    Eigen::MatrixXd restricted(t_eff, 1 + lag);
    for (int t = lag; t < total; ++t) {
        int row = t - lag;
        response(row) = y[t];
        unrestricted(row, 0) = 1.0;
        restricted(row, 0) = 1.0;
        for (int k = 1; k <= lag; ++k) {
            unrestricted(row, k) = y[t - k];
            unrestricted(row, lag + k) = x[t - k];
            restricted(row, k) = y[t - k];
        }
    }

    Ols full = solve_ols(unrestricted, response);
    Ols base = solve_ols(restricted, response);

    VarFit fit;
    fit.lag = lag;
    fit.sample_size = t_eff;
    fit.coef = full.beta;
    fit.rss_unrestricted = full.rss;
    fit.rss_restricted = std::max(base.rss, full.rss); // nested model, clamp FP noise
    const int dof = t_eff - k_unrestricted;
    double sigma2 = full.rss / dof;
    fit.coef_se = (sigma2 * full.xtx_inv.diagonal().array()).cwiseMax(0.0).sqrt();
    return fit;
}

EdgeTest granger_test(const VarFit& fit, int source, int target) {
    const int p = fit.lag;
    const int dof2 = fit.sample_size - 2 * p - 1;
    if (dof2 <= 0) throw DataError("sample too small for Granger test");
    if (fit.rss_unrestricted <= 0.0)
        throw NumericalError("exact fit: unrestricted RSS is zero, F statistic undefined");

    EdgeTest test;
    test.source = source;
    test.target = target;
    test.f_stat = std::max(0.0, ((fit.rss_restricted - fit.rss_unrestricted) / p) /
                                    (fit.rss_unrestricted / dof2));
    if (test.f_stat == 0.0) {
        test.p_value = 1.0;
    } else {
        boost::math::fisher_f dist(p, dof2);
        test.p_value = boost::math::cdf(boost::math::complement(dist, test.f_stat));
    }
    return test;
}

namespace {

NetworkResult build_network_rows(const ReturnPanel& panel, size_t first, size_t count,
                                 const NetworkOptions& options) {
    if (options.lag < 1) throw ConfigError("lag order must be >= 1");
    if (options.significance <= 0.0 || options.significance >= 1.0)
        throw ConfigError("significance level must lie in (0, 1)");
    const size_t min_len = 2 * static_cast<size_t>(options.lag) + 5;
    if (count < min_len)
        throw DataError("window of " + std::to_string(count) + " observations shorter than minimum " +
                        std::to_string(min_len) + " for lag " + std::to_string(options.lag));

    const size_t n = panel.n_firms();
    // Gap-free series per firm over the window; firms with gaps stay untested.
    std::vector<std::optional<std::vector<double>>> series(n);
    for (size_t f = 0; f < n; ++f) {
        std::vector<double> s;
        s.reserve(count);
        bool complete = true;
        for (size_t t = first; t < first + count; ++t) {
            if (!panel.has(t, f)) {
                complete = false;
                break;
            }
            s.push_back(panel.value(t, f));
        }
        if (complete) series[f] = std::move(s);
    }

    NetworkResult result{DirectedGraph(panel.firms()), {}, {}};
    std::vector<EdgeTest> tests;
    for (size_t j = 0; j < n; ++j) {
        for (size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            if (!series[j] || !series[i]) {
                result.skipped.emplace_back(static_cast<int>(j), static_cast<int>(i));
                continue;
            }
            try {
                VarFit fit = fit_bivariate_var(*series[j], *series[i], options.lag);
                tests.push_back(granger_test(fit, static_cast<int>(j), static_cast<int>(i)));
            } catch (const NumericalError&) {
                result.skipped.emplace_back(static_cast<int>(j), static_cast<int>(i));
            }
        }
    }

    double threshold = options.significance;
    bool strict = true; // edge when p < significance
    if (options.fdr) {
        // Benjamini-Hochberg: largest k with p_(k) <= k/m * q.
        std::vector<double> pvals;
        pvals.reserve(tests.size());
        for (const auto& t : tests) pvals.push_back(t.p_value);
        std::sort(pvals.begin(), pvals.end());
        threshold = -1.0;
        for (size_t k = pvals.size(); k >= 1; --k) {
            if (pvals[k - 1] <= static_cast<double>(k) / pvals.size() * options.significance) {
                threshold = pvals[k - 1];
                break;
            }
        }
        strict = false; // edge when p <= BH cutoff
    }

    for (const auto& t : tests) {
        bool reject = strict ? t.p_value < threshold : t.p_value <= threshold;
        if (reject) {
            result.graph.add_edge(t.source, t.target);
            result.edge_tests.push_back(t);
        }
    }
    return result;
}

} // namespace

NetworkResult build_network(const ReturnPanel& panel, const Date& start, const Date& end,
                            const NetworkOptions& options) {
    auto idx = panel.window_indices(start, end);
    if (idx.empty()) throw DataError("empty network window");
    NetworkResult result = build_network_rows(panel, idx.front(), idx.size(), options);
    result.graph.set_timestamp(panel.dates()[idx.back()]);
    return result;
}

SnapshotsResult build_snapshots(const ReturnPanel& panel, size_t window_length, size_t step,
                                const NetworkOptions& options) {
    if (step == 0) throw ConfigError("snapshot step must be positive");
    if (window_length == 0 || panel.n_dates() < window_length)
        throw DataError("panel shorter than snapshot window");

    SnapshotsResult out;
    for (size_t first = 0; first + window_length <= panel.n_dates(); first += step) {
        NetworkResult r = build_network_rows(panel, first, window_length, options);
        r.graph.set_timestamp(panel.dates()[first + window_length - 1]);
        out.window_rows.emplace_back(first, window_length);
        out.snapshots.push_back(r.graph);
        out.details.push_back(std::move(r));
    }
    return out;
}

} // namespace spillnet
