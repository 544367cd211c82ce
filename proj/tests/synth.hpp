// Synthetic data generators shared by the pipeline tests and the acceptance
// suite: planted-graph VAR panels, pseudo-calendar grids, and full on-disk
// study fixtures.
#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spillnet/csv.hpp"
#include "spillnet/date.hpp"
#include "spillnet/granger.hpp"
#include "spillnet/graph.hpp"
#include "spillnet/pipeline.hpp"

namespace synth {

namespace fs = std::filesystem;

inline fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("spillnet_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

inline std::vector<std::string> firm_names(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "F%02d", i);
        names.push_back(buf);
    }
    return names;
}

inline int last_day_of_month(int year, int month) {
    static const int d[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return month == 2 && leap ? 29 : d[month - 1];
}

/// End-of-month observation dates.
inline std::vector<spillnet::Date> monthly_dates(int year, int month, int count) {
    std::vector<spillnet::Date> dates;
    for (int k = 0; k < count; ++k) {
        dates.push_back({year, month, last_day_of_month(year, month)});
        if (++month > 12) {
            month = 1;
            ++year;
        }
    }
    return dates;
}

/// 21 pseudo trading days per month.
inline std::vector<spillnet::Date> daily_dates(int year, int month, int months) {
    std::vector<spillnet::Date> dates;
    for (int k = 0; k < months; ++k) {
        for (int d = 1; d <= 21; ++d) dates.push_back({year, month, d});
        if (++month > 12) {
            month = 1;
            ++year;
        }
    }
    return dates;
}

/// VAR(1) panel on a planted graph: r_i(t) = sum_{j->i} c_i r_j(t-1) + eps,
/// with c_i = coupling / max(1, indeg(i)) so the system stays stable.
inline Eigen::MatrixXd var_panel(const spillnet::DirectedGraph& graph, int t_len, double coupling,
                                 double noise_sd, std::mt19937& rng) {
    const int n = static_cast<int>(graph.size());
    std::normal_distribution<double> noise(0.0, noise_sd);
    Eigen::MatrixXd r(t_len, n);
    for (int i = 0; i < n; ++i) r(0, i) = noise(rng);
    for (int t = 1; t < t_len; ++t) {
        for (int i = 0; i < n; ++i) {
            const auto& in = graph.in_neighbors(i);
            double c = coupling / std::max<size_t>(1, in.size());
            double acc = 0.0;
            for (int j : in) acc += c * r(t - 1, j);
            r(t, i) = acc + noise(rng);
        }
    }
    return r;
}

inline spillnet::ReturnPanel return_panel(const std::vector<spillnet::Date>& dates,
                                          const std::vector<std::string>& firms,
                                          const Eigen::MatrixXd& r) {
    std::vector<std::optional<double>> cells;
    cells.reserve(r.size());
    for (Eigen::Index t = 0; t < r.rows(); ++t)
        for (Eigen::Index f = 0; f < r.cols(); ++f) cells.emplace_back(r(t, f));
    return spillnet::ReturnPanel(dates, firms, std::move(cells));
}

/// Prices = 100 * exp(cumulative returns); row 0 is the base price.
inline Eigen::MatrixXd prices_from_returns(const Eigen::MatrixXd& returns) {
    Eigen::MatrixXd p(returns.rows() + 1, returns.cols());
    for (Eigen::Index f = 0; f < returns.cols(); ++f) {
        double level = std::log(100.0);
        p(0, f) = std::exp(level);
        for (Eigen::Index t = 0; t < returns.rows(); ++t) {
            level += returns(t, f);
            p(t + 1, f) = std::exp(level);
        }
    }
    return p;
}

inline void write_price_csv(const fs::path& path, const std::vector<spillnet::Date>& dates,
                            const std::vector<std::string>& firms, const Eigen::MatrixXd& prices) {
    std::vector<std::string> header{"date"};
    header.insert(header.end(), firms.begin(), firms.end());
    std::vector<std::vector<std::string>> rows;
    for (Eigen::Index t = 0; t < prices.rows(); ++t) {
        std::vector<std::string> row{dates[t].to_string()};
        for (Eigen::Index f = 0; f < prices.cols(); ++f)
            row.push_back(spillnet::csv::format(prices(t, f)));
        rows.push_back(std::move(row));
    }
    spillnet::csv::write_file(path.string(), header, rows);
}

inline void write_sector_csv(const fs::path& path, const std::vector<std::string>& firms) {
    static const char* sectors[] = {"6020", "6211", "6311", "6500"};
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < firms.size(); ++i) rows.push_back({firms[i], sectors[i % 4]});
    spillnet::csv::write_file(path.string(), {"ticker", "sector"}, rows);
}

/// A complete on-disk study: monthly VAR panel for the network (2000-01 ..
/// 2008-12), daily panel for the targets (2007-01 .. 2008-12) whose crisis
/// returns are a planted linear function of an out-degree vector, sectors,
/// and a ready config. The planted out-degrees are taken from the caller
/// (usually the out-degrees of the network the monthly panel will yield).
struct Study {
    fs::path dir;
    spillnet::PipelineConfig config;
    std::vector<std::string> firms;
};

inline spillnet::PipelineConfig base_config(const fs::path& dir) {
    spillnet::PipelineConfig c;
    c.monthly_prices = (dir / "monthly.csv").string();
    c.daily_prices = (dir / "daily.csv").string();
    c.sectors = (dir / "sectors.csv").string();
    c.output_dir = (dir / "out").string();
    c.crisis_windows = {{spillnet::Date{2008, 1, 1}, spillnet::Date{2008, 12, 31}, "12m"},
                        {spillnet::Date{2007, 7, 1}, spillnet::Date{2008, 12, 31}, "18m"}};
    c.min_consecutive = 36;
    c.network_window = 48;
    c.network_step = 12;
    c.network.lag = 1;
    c.network.significance = 0.05;
    c.metrics.reach_m = 2;
    c.metrics.katz_attenuation = 0.1;
    c.alphas = {1.0};
    c.folds = 10;
    c.seed_set = true;
    c.en_seed = 7;
    c.path_length = 100;
    return c;
}

/// Writes monthly.csv (VAR panel on `graph`) and sectors.csv; the daily
/// panel is written separately once the planted out-degrees are known.
inline Study study_skeleton(const std::string& name, const spillnet::DirectedGraph& graph,
                            int months, std::mt19937& rng, double coupling = 0.45,
                            double noise_sd = 0.04) {
    Study s;
    s.dir = fresh_dir(name);
    s.firms = graph.labels();
    s.config = base_config(s.dir);

    Eigen::MatrixXd monthly_returns = var_panel(graph, months, coupling, noise_sd, rng);
    Eigen::MatrixXd monthly_prices = prices_from_returns(monthly_returns);
    // months + 1 price rows starting 1999-12 give `months` return rows from 2000-01
    write_price_csv(s.dir / "monthly.csv", monthly_dates(1999, 12, months + 1), s.firms,
                    monthly_prices);
    write_sector_csv(s.dir / "sectors.csv", s.firms);
    return s;
}

/// Daily targets panel: 24 months (2007-01 .. 2008-12), 21 days each. The
/// log-return sum over 2008 is exactly base_12m + slope * outdeg + noise and
/// the 2007H2 segment adds another planted half-slope component, so both
/// cumulative-return definitions are linear in out-degree while drawdowns
/// move the opposite way.
inline void write_daily_targets(Study& s, const std::vector<double>& outdeg, std::mt19937& rng,
                                double slope = 0.09, double base_12m = -0.55,
                                double noise_sd = 0.02, double day_sd = 0.01) {
    const int n = static_cast<int>(s.firms.size());
    auto dates = daily_dates(2007, 1, 24);
    const int days = static_cast<int>(dates.size()); // 504
    std::normal_distribution<double> eps(0.0, 1.0);

    Eigen::MatrixXd rets(days - 1, n);
    auto in_range = [&](int t, spillnet::Date lo, spillnet::Date hi) {
        return !(dates[t + 1] < lo) && !(hi < dates[t + 1]);
    };
    for (int f = 0; f < n; ++f) {
        double target_12m = base_12m + slope * outdeg[f] + noise_sd * eps(rng);
        double target_h2 = -0.10 + 0.5 * slope * outdeg[f] + noise_sd * eps(rng);
        std::vector<int> rows_12m, rows_h2;
        for (int t = 0; t + 1 < days; ++t) {
            rets(t, f) = day_sd * eps(rng);
            if (in_range(t, {2008, 1, 1}, {2008, 12, 31})) rows_12m.push_back(t);
            if (in_range(t, {2007, 7, 1}, {2007, 12, 31})) rows_h2.push_back(t);
        }
        // Re-center each segment so its sum hits the planted target exactly.
        for (auto [rows, target] : {std::pair{&rows_12m, target_12m}, {&rows_h2, target_h2}}) {
            double sum = 0.0;
            for (int t : *rows) sum += rets(t, f);
            double adjust = (target - sum) / static_cast<double>(rows->size());
            for (int t : *rows) rets(t, f) += adjust;
        }
    }
    write_price_csv(s.dir / "daily.csv", dates, s.firms, prices_from_returns(rets));
}

/// Full planted-effect fixture: a random spillover graph drives the monthly
/// VAR panel; the daily crisis returns are generated as a linear function of
/// the out-degrees of the network the pipeline itself will recover from that
/// panel (replayed here through the same library calls and parameters).
inline Study planted_study(const std::string& name, int n_firms, unsigned seed,
                           double edge_prob = 0.08) {
    std::mt19937 rng(seed);
    spillnet::DirectedGraph true_graph = oracle::random_digraph(n_firms, edge_prob, rng);
    Study s = study_skeleton(name, true_graph, 108, rng);

    spillnet::PricePanel monthly = spillnet::load_price_csv(s.config.monthly_prices);
    spillnet::ReturnPanel returns = spillnet::to_log_returns(monthly);
    spillnet::ReturnPanel filtered = spillnet::filter_sample(
        returns, s.config.min_consecutive,
        {spillnet::Date{2007, 7, 1}, spillnet::Date{2008, 12, 31}, "union"});
    spillnet::SnapshotsResult snaps = spillnet::build_snapshots(
        filtered, s.config.network_window, s.config.network_step, s.config.network);
    const spillnet::DirectedGraph& precrisis = snaps.snapshots.at(3); // ends 2006-12-31

    std::vector<double> outdeg(n_firms);
    for (int v = 0; v < n_firms; ++v)
        outdeg[v] = precrisis.degree(v, spillnet::Direction::Out);
    write_daily_targets(s, outdeg, rng);
    return s;
}

} // namespace synth
