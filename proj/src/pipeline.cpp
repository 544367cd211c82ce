#include "spillnet/pipeline.hpp"

#include <algorithm>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <set>
#include <unistd.h>

#include "spillnet/csv.hpp"
#include "spillnet/io.hpp"
#include "spillnet/louvain.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace spillnet {

namespace {

const std::vector<std::pair<std::string, std::vector<Level>>> kSpecs = {
    {"gt", {Level::GT}},
    {"gt_at", {Level::GT, Level::AT}},
    {"full", {Level::GT, Level::LT, Level::AT, Level::NewGT, Level::NewAT}},
};

std::vector<CrisisWindow> default_windows() {
    return {{Date{2008, 1, 1}, Date{2008, 12, 31}, "12m"},
            {Date{2007, 7, 1}, Date{2008, 12, 31}, "18m"}};
}

} // namespace

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return from_json(j);
}

PipelineConfig PipelineConfig::from_json(const json& j) {
    PipelineConfig c;
    c.crisis_windows = default_windows();
    try {
        const auto& paths = j.at("paths");
        c.monthly_prices = paths.at("monthly_prices").get<std::string>();
        c.sectors = paths.at("sectors").get<std::string>();
        c.output_dir = paths.at("output_dir").get<std::string>();
        if (paths.contains("daily_prices")) c.daily_prices = paths["daily_prices"].get<std::string>();

        if (j.contains("crisis_windows")) {
            c.crisis_windows.clear();
            for (const auto& w : j["crisis_windows"])
                c.crisis_windows.push_back({Date::parse(w.at("start").get<std::string>()),
                                            Date::parse(w.at("end").get<std::string>()),
                                            w.at("label").get<std::string>()});
        }
        if (j.contains("filters"))
            c.min_consecutive = j["filters"].value("min_consecutive", c.min_consecutive);
        if (j.contains("network")) {
            const auto& n = j["network"];
            c.network_window = n.value("window", c.network_window);
            c.network_step = n.value("step", c.network_step);
            c.network.lag = n.value("lag", c.network.lag);
            c.network.significance = n.value("significance", c.network.significance);
            c.network.fdr = n.value("fdr", c.network.fdr);
        }
        if (j.contains("communities")) {
            const auto& l = j["communities"];
            c.louvain_resolution = l.value("resolution", c.louvain_resolution);
            c.louvain_seed = l.value("seed", c.louvain_seed);
            c.louvain_shuffle = l.value("shuffle", c.louvain_shuffle);
        }
        if (j.contains("metrics")) {
            const auto& m = j["metrics"];
            c.metrics.reach_m = m.value("m", c.metrics.reach_m);
            c.metrics.katz_attenuation = m.value("katz_attenuation", c.metrics.katz_attenuation);
            c.metrics.ratio_cap = m.value("ratio_cap", c.metrics.ratio_cap);
        }
        const auto& en = j.at("elastic_net");
        c.en_seed = en.at("seed").get<unsigned>();
        c.seed_set = true;
        if (en.contains("alphas")) c.alphas = en["alphas"].get<std::vector<double>>();
        c.folds = en.value("folds", c.folds);
        c.path_length = en.value("path_length", c.path_length);
        c.path_min_ratio = en.value("path_min_ratio", c.path_min_ratio);
        c.en_tol = en.value("tol", c.en_tol);
        c.en_max_sweeps = en.value("max_sweeps", c.en_max_sweeps);
        if (en.contains("lambda_rule")) {
            std::string rule = en["lambda_rule"].get<std::string>();
            if (rule == "min")
                c.rule = LambdaRule::Min;
            else if (rule == "one-se")
                c.rule = LambdaRule::OneSe;
            else
                throw ConfigError("lambda_rule must be 'min' or 'one-se', got '" + rule + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
    c.validate();
    return c;
}

void PipelineConfig::validate() const {
    if (monthly_prices.empty() || sectors.empty() || output_dir.empty())
        throw ConfigError("paths.monthly_prices, paths.sectors and paths.output_dir are required");
    if (!fs::exists(monthly_prices))
        throw ConfigError("[stage panel_io] price file '" + monthly_prices + "' does not exist");
    if (!daily_prices.empty() && !fs::exists(daily_prices))
        throw ConfigError("[stage panel_io] price file '" + daily_prices + "' does not exist");
    if (!fs::exists(sectors))
        throw ConfigError("[stage panel_io] sector file '" + sectors + "' does not exist");
    if (crisis_windows.empty()) throw ConfigError("at least one crisis window is required");
    std::set<std::string> labels;
    for (const auto& w : crisis_windows) {
        if (!(w.start < w.end))
            throw ConfigError("crisis window '" + w.label + "' start must precede end");
        if (w.label.empty() || !labels.insert(w.label).second)
            throw ConfigError("crisis window labels must be unique and non-empty");
    }
    if (min_consecutive < 1) throw ConfigError("filters.min_consecutive must be >= 1");
    if (network_step == 0) throw ConfigError("network.step must be positive");
    if (network_window < 2 * static_cast<size_t>(network.lag) + 5)
        throw ConfigError("network.window shorter than the minimum for the configured lag");
    if (network.significance <= 0.0 || network.significance >= 1.0)
        throw ConfigError("network.significance must lie in (0, 1)");
    if (metrics.reach_m < 1) throw ConfigError("metrics.m must be >= 1");
    if (metrics.katz_attenuation <= 0.0) throw ConfigError("metrics.katz_attenuation must be > 0");
    if (path_min_ratio < 0.0 || path_min_ratio > 1.0)
        throw ConfigError("elastic_net.path_min_ratio must lie in [0, 1] (0 = auto)");
    if (alphas.empty()) throw ConfigError("elastic_net.alphas must not be empty");
    for (double a : alphas)
        if (a <= 0.0 || a > 1.0) throw ConfigError("alpha values must lie in (0, 1]");
    if (folds < 2) throw ConfigError("elastic_net.folds must be >= 2");
    if (!seed_set) throw ConfigError("elastic_net.seed is required");
    if (louvain_resolution <= 0.0) throw ConfigError("communities.resolution must be > 0");
}

ordered_json PipelineConfig::echo() const {
    ordered_json j;
    j["paths"] = {{"monthly_prices", monthly_prices},
                  {"daily_prices", daily_prices},
                  {"sectors", sectors},
                  {"output_dir", output_dir}};
    j["crisis_windows"] = ordered_json::array();
    for (const auto& w : crisis_windows)
        j["crisis_windows"].push_back(
            {{"label", w.label}, {"start", w.start.to_string()}, {"end", w.end.to_string()}});
    j["filters"] = {{"min_consecutive", min_consecutive}};
    j["network"] = {{"window", network_window},
                    {"step", network_step},
                    {"lag", network.lag},
                    {"significance", network.significance},
                    {"fdr", network.fdr}};
    j["communities"] = {{"resolution", louvain_resolution},
                        {"seed", louvain_seed},
                        {"shuffle", louvain_shuffle}};
    j["metrics"] = {{"m", metrics.reach_m},
                    {"katz_attenuation", metrics.katz_attenuation},
                    {"ratio_cap", metrics.ratio_cap}};
    j["elastic_net"] = {{"alphas", alphas},
                        {"folds", folds},
                        {"seed", en_seed},
                        {"lambda_rule", rule == LambdaRule::Min ? "min" : "one-se"},
                        {"path_length", path_length},
                        {"path_min_ratio", path_min_ratio},
                        {"tol", en_tol},
                        {"max_sweeps", en_max_sweeps}};
    return j;
}

std::string PipelineConfig::out(const std::string& name) const {
    return (fs::path(output_dir) / name).string();
}

std::vector<std::string> PipelineConfig::depvar_names() const {
    std::vector<std::string> names;
    for (const auto& w : crisis_windows) names.push_back("cr_" + w.label);
    for (const auto& w : crisis_windows) names.push_back("md_" + w.label);
    return names;
}

Date PipelineConfig::earliest_crisis_start() const {
    Date d = crisis_windows.front().start;
    for (const auto& w : crisis_windows) d = std::min(d, w.start);
    return d;
}

// ---------------------------------------------------------------------------
// stages
// ---------------------------------------------------------------------------

namespace {

CrisisWindow union_window(const PipelineConfig& c) {
    Date start = c.crisis_windows.front().start, end = c.crisis_windows.front().end;
    for (const auto& w : c.crisis_windows) {
        start = std::min(start, w.start);
        end = std::max(end, w.end);
    }
    return {start, end, "union"};
}

ordered_json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return ordered_json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("'" + path + "' is not valid JSON: " + std::string(e.what()));
    }
}

void write_json_file(const std::string& path, const ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

SnapshotSequence read_snapshots(const PipelineConfig& c, const std::vector<std::string>& tickers,
                                size_t n_snapshots) {
    SnapshotSequence snaps;
    for (size_t k = 0; k < n_snapshots; ++k)
        snaps.push_back(io::read_edges_csv(c.out("edges_" + std::to_string(k) + ".csv"), tickers));
    return snaps;
}

} // namespace

void stage_network(const PipelineConfig& config) {
    fs::create_directories(config.output_dir);

    PricePanel prices = load_price_csv(config.monthly_prices);
    ReturnPanel returns = to_log_returns(prices);
    ReturnPanel filtered = filter_sample(returns, config.min_consecutive, union_window(config));

    SnapshotsResult snaps =
        build_snapshots(filtered, config.network_window, config.network_step, config.network);

    // Pre-crisis reference: the last snapshot ending before the earliest
    // crisis start. Temporal m-reach consumes m consecutive snapshots from it.
    Date crisis_start = config.earliest_crisis_start();
    int precrisis = -1;
    for (size_t k = 0; k < snaps.snapshots.size(); ++k)
        if (*snaps.snapshots[k].timestamp() < crisis_start) precrisis = static_cast<int>(k);
    if (precrisis < 0)
        throw ConfigError("no snapshot window ends before the crisis start " +
                          crisis_start.to_string());
    if (static_cast<size_t>(precrisis) + config.metrics.reach_m > snaps.snapshots.size())
        throw ConfigError("temporal " + std::to_string(config.metrics.reach_m) +
                          "-reach needs " + std::to_string(config.metrics.reach_m) +
                          " snapshots from the pre-crisis one; increase the panel or reduce step");

    io::write_nodes_csv(config.out("nodes.csv"), filtered.firms());
    for (size_t k = 0; k < snaps.snapshots.size(); ++k)
        io::write_edges_csv(config.out("edges_" + std::to_string(k) + ".csv"), snaps.snapshots[k],
                            snaps.details[k].edge_tests);

    ordered_json meta;
    meta["n_firms"] = filtered.n_firms();
    meta["n_snapshots"] = snaps.snapshots.size();
    meta["snapshot_end_dates"] = ordered_json::array();
    for (const auto& g : snaps.snapshots)
        meta["snapshot_end_dates"].push_back(g.timestamp()->to_string());
    meta["window_rows"] = ordered_json::array();
    for (const auto& [first, count] : snaps.window_rows)
        meta["window_rows"].push_back({first, count});
    meta["skipped_pairs"] = ordered_json::array();
    for (const auto& d : snaps.details) meta["skipped_pairs"].push_back(d.skipped.size());
    meta["precrisis_index"] = precrisis;
    write_json_file(config.out("network_meta.json"), meta);
}

void stage_communities(const PipelineConfig& config) {
    fs::create_directories(config.output_dir);
    auto tickers = io::read_nodes_csv(config.out("nodes.csv"));
    auto meta = read_json_file(config.out("network_meta.json"));
    size_t precrisis = meta.at("precrisis_index").get<size_t>();

    DirectedGraph graph =
        io::read_edges_csv(config.out("edges_" + std::to_string(precrisis) + ".csv"), tickers);
    LouvainResult res =
        louvain(graph, config.louvain_resolution, config.louvain_seed, config.louvain_shuffle);
    io::write_partition_csv(config.out("partition.csv"), tickers, res.partition);
}

void stage_metrics(const PipelineConfig& config) {
    fs::create_directories(config.output_dir);
    auto tickers = io::read_nodes_csv(config.out("nodes.csv"));
    auto meta = read_json_file(config.out("network_meta.json"));
    size_t precrisis = meta.at("precrisis_index").get<size_t>();
    size_t n_snapshots = meta.at("n_snapshots").get<size_t>();

    SectorMap sectors = load_sector_csv(config.sectors);
    for (const auto& t : tickers)
        if (!sectors.find(t)) throw DataError("firm '" + t + "' has no sector label");

    SnapshotSequence snaps = read_snapshots(config, tickers, n_snapshots);
    Partition partition = io::read_partition_csv(config.out("partition.csv"), tickers);

    std::vector<std::string> notes;
    MetricTable table = compute_metric_table(snaps[precrisis], partition, snaps, precrisis,
                                             sectors, config.metrics, &notes);
    CorrelationResult corr = correlation_matrix(table);

    io::write_metrics_csv(config.out("metrics.csv"), table);
    io::write_correlation_csv(config.out("correlation.csv"), corr);

    ordered_json notes_json;
    notes_json["capped_ratios"] = notes;
    notes_json["zero_variance_correlation"] = corr.zero_variance;
    write_json_file(config.out("metrics_notes.json"), notes_json);
}

void stage_targets(const PipelineConfig& config) {
    fs::create_directories(config.output_dir);
    auto tickers = io::read_nodes_csv(config.out("nodes.csv"));

    std::string source = config.daily_prices.empty() ? config.monthly_prices : config.daily_prices;
    PricePanel prices = load_price_csv(source);
    ReturnPanel returns = to_log_returns(prices);

    io::Targets targets;
    targets.tickers = tickers;
    targets.names = config.depvar_names();
    targets.values.resize(tickers.size(), targets.names.size());
    Eigen::Index col = 0;
    for (const auto& w : config.crisis_windows) {
        for (size_t i = 0; i < tickers.size(); ++i)
            targets.values(i, col) = cumulative_return(returns, tickers[i], w);
        ++col;
    }
    for (const auto& w : config.crisis_windows) {
        for (size_t i = 0; i < tickers.size(); ++i)
            targets.values(i, col) = max_drawdown(prices, tickers[i], w);
        ++col;
    }
    io::write_targets_csv(config.out("targets.csv"), targets);
}

// ---------------------------------------------------------------------------
// regression stage
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> assumption_log(const PipelineConfig& c, size_t precrisis,
                                        const std::string& precrisis_date) {
    std::vector<std::string> a;
    a.push_back("spillover backend: classical rolling-window pairwise Granger F-tests on an OLS "
                "bivariate VAR; the cited Bayesian TVP-VAR is out of scope");
    a.push_back("network lag order p = " + std::to_string(c.network.lag) +
                " and significance level " + csv::format(c.network.significance) +
                " are defaults; the source study states neither");
    a.push_back(c.network.fdr
                    ? "multiple testing: Benjamini-Hochberg FDR applied per window"
                    : "multiple testing: none (matching the cited methodology); FDR switch off");
    a.push_back("rolling window = " + std::to_string(c.network_window) + " observations, step = " +
                std::to_string(c.network_step));
    a.push_back("pre-crisis network = snapshot " + std::to_string(precrisis) + " ending " +
                precrisis_date + " (last window ending before the earliest crisis start)");
    a.push_back("pairs with missing data inside a window are skipped, never imputed");
    a.push_back("communities: Louvain on the symmetrized unweighted view, resolution " +
                csv::format(c.louvain_resolution));
    a.push_back("metrics: m = " + std::to_string(c.metrics.reach_m) +
                " for every reach metric; Katz attenuation = " +
                csv::format(c.metrics.katz_attenuation) + " with runtime spectral-radius guard");
    a.push_back("metrics: infinite inter/intra ratios capped at " + csv::format(c.metrics.ratio_cap));
    a.push_back("sample filters: >= " + std::to_string(c.min_consecutive) +
                " consecutive pre-crisis observations, first observation pre-crisis, full data "
                "through the union crisis window");
    a.push_back(c.daily_prices.empty()
                    ? "targets: monthly panel reused (no separate daily panel configured)"
                    : "targets: separate panel '" + c.daily_prices + "'");
    std::string alphas = "[";
    for (size_t i = 0; i < c.alphas.size(); ++i)
        alphas += (i ? ", " : "") + csv::format(c.alphas[i]);
    alphas += "]";
    a.push_back("elastic net: alpha list " + alphas + ", headline alpha = " +
                csv::format(c.alphas.front()));
    a.push_back("elastic net: " + std::to_string(c.folds) + "-fold CV, seed " +
                std::to_string(c.en_seed) + ", lambda rule '" +
                (c.rule == LambdaRule::Min ? std::string("min") : std::string("one-se")) +
                "', columns standardized (population variance), intercept unpenalized via "
                "centering");
    a.push_back("significant variable := exactly nonzero coefficient at the chosen lambda");
    return a;
}

struct TierDesign {
    std::vector<std::string> ids; // level-tagged column ids
    Eigen::MatrixXd x;
};

TierDesign tier_design(const MetricTable& table, const std::vector<Level>& levels,
                       const std::vector<bool>& dropped) {
    TierDesign d;
    const size_t n = table.tickers.size();
    std::vector<const MetricColumn*> cols;
    for (size_t j = 0; j < table.columns.size(); ++j) {
        if (dropped[j]) continue;
        if (std::find(levels.begin(), levels.end(), table.columns[j].level) != levels.end())
            cols.push_back(&table.columns[j]);
    }
    d.x.resize(n, cols.size());
    for (size_t k = 0; k < cols.size(); ++k) {
        d.ids.push_back(cols[k]->id());
        for (size_t i = 0; i < n; ++i) d.x(i, k) = cols[k]->values[i];
    }
    return d;
}

std::pair<std::string, std::string> split_id(const std::string& id) {
    auto dot = id.find('.');
    return {id.substr(0, dot), id.substr(dot + 1)};
}

void write_fit_csv(const std::string& path, const FitRecord& rec) {
    std::vector<std::vector<std::string>> rows;
    for (size_t j = 0; j < rec.variables.size(); ++j) {
        auto [level, name] = split_id(rec.variables[j]);
        double coef = rec.fit.coef(j);
        bool sel = coef != 0.0;
        rows.push_back({name, level, csv::format(coef), sel ? (coef > 0 ? "+" : "-") : "",
                        sel ? "1" : "0"});
    }
    csv::write_file(path, {"variable", "level", "coefficient", "sign", "selected"}, rows);
}

void write_cv_csv(const std::string& path, const CvCurve& cv) {
    std::vector<std::vector<std::string>> rows;
    for (size_t g = 0; g < cv.lambda.size(); ++g)
        rows.push_back({csv::format(cv.lambda[g]), csv::format(cv.mean_mse[g]),
                        csv::format(cv.se_mse[g])});
    csv::write_file(path, {"lambda", "mean_mse", "se_mse"}, rows);
}

} // namespace

std::vector<std::pair<std::string, std::string>> hypothesis_summary(
    const std::vector<FitRecord>& fits, const std::vector<std::string>& depvars) {
    std::vector<std::pair<std::string, std::string>> verdicts;
    for (const auto& dv : depvars) {
        const FitRecord* full = nullptr;
        for (const auto& f : fits)
            if (f.spec == "full" && f.depvar == dv) full = &f;
        if (!full) throw DataError("missing full-model fit for depvar '" + dv + "'");
        bool has_lt = false, has_gt = false;
        for (const auto& sel : full->fit.active) {
            auto [level, name] = split_id(sel.name);
            if (level == level_tag(Level::LT)) has_lt = true;
            if (level == level_tag(Level::GT)) has_gt = true;
        }
        std::string verdict = has_lt && has_gt ? "H3"
                              : has_lt         ? "H1"
                              : has_gt         ? "H2"
                                               : "inconclusive";
        verdicts.emplace_back(dv, verdict);
    }
    return verdicts;
}

void emit_tables(const std::vector<FitRecord>& fits, const std::vector<std::string>& depvars,
                 const PipelineConfig& config) {
    for (const auto& [spec, levels] : kSpecs) {
        (void)levels;
        // variable id -> sign per depvar, in design-column order
        std::vector<std::string> order;
        std::map<std::string, std::map<std::string, std::string>> signs;
        for (const auto& f : fits) {
            if (f.spec != spec) continue;
            if (order.empty()) order = f.variables;
            for (const auto& sel : f.fit.active) signs[sel.name][f.depvar] = sel.sign > 0 ? "+" : "-";
        }
        std::vector<std::vector<std::string>> rows;
        for (const auto& id : order) {
            auto it = signs.find(id);
            if (it == signs.end()) continue; // never selected: omitted
            auto [level, name] = split_id(id);
            std::vector<std::string> row{name, level};
            for (const auto& dv : depvars) {
                auto s = it->second.find(dv);
                row.push_back(s == it->second.end() ? "" : s->second);
            }
            rows.push_back(std::move(row));
        }
        std::vector<std::string> header{"variable", "level"};
        header.insert(header.end(), depvars.begin(), depvars.end());
        csv::write_file(config.out("table_" + spec + ".csv"), header, rows);
    }
}

RunReport stage_regress(const PipelineConfig& config) {
    fs::create_directories(config.output_dir);
    auto tickers = io::read_nodes_csv(config.out("nodes.csv"));
    auto meta = read_json_file(config.out("network_meta.json"));
    size_t precrisis = meta.at("precrisis_index").get<size_t>();
    auto notes = read_json_file(config.out("metrics_notes.json"));

    Partition partition = io::read_partition_csv(config.out("partition.csv"), tickers);
    DirectedGraph precrisis_graph =
        io::read_edges_csv(config.out("edges_" + std::to_string(precrisis) + ".csv"), tickers);
    MetricTable table = io::read_metrics_csv(config.out("metrics.csv"));
    io::Targets targets = io::read_targets_csv(config.out("targets.csv"));
    if (table.tickers != tickers || targets.tickers != tickers)
        throw DataError("metrics/targets firm sets disagree with nodes.csv");

    std::vector<std::string> depvars = config.depvar_names();
    for (const auto& dv : depvars)
        if (std::find(targets.names.begin(), targets.names.end(), dv) == targets.names.end())
            throw DataError("targets.csv lacks dependent variable '" + dv + "'");

    // Zero-variance columns cannot be standardized: drop once, with warning.
    const size_t n = tickers.size();
    std::vector<bool> dropped(table.columns.size(), false);
    std::vector<std::string> dropped_ids;
    for (size_t j = 0; j < table.columns.size(); ++j) {
        Eigen::Map<const Eigen::VectorXd> v(table.columns[j].values.data(), n);
        if ((v.array() - v.mean()).matrix().norm() == 0.0) {
            dropped[j] = true;
            dropped_ids.push_back(table.columns[j].id());
        }
    }

    auto fit_all = [&](double alpha) {
        std::vector<FitRecord> records;
        for (const auto& [spec, levels] : kSpecs) {
            TierDesign tier = tier_design(table, levels, dropped);
            if (tier.ids.empty())
                throw DataError("specification '" + spec + "' has no usable columns");
            for (const auto& dv : depvars) {
                size_t t = std::find(targets.names.begin(), targets.names.end(), dv) -
                           targets.names.begin();
                DesignMatrix design{tier.x, targets.values.col(t), tier.ids};
                EnConfig en;
                en.alpha = alpha;
                en.folds = config.folds;
                en.seed = config.en_seed;
                en.rule = config.rule;
                en.path_length = config.path_length;
                // glmnet's floor rule: stop the path higher when P >= N,
                // where the tail is degenerate anyway.
                en.path_min_ratio = config.path_min_ratio > 0.0 ? config.path_min_ratio
                                    : tier.x.rows() > tier.x.cols() ? 1e-3
                                                                    : 1e-2;
                en.tol = config.en_tol;
                en.max_sweeps = config.en_max_sweeps;
                FitRecord rec{spec, dv, tier.ids, fit(design, en)};
                records.push_back(std::move(rec));
            }
        }
        return records;
    };

    double headline = config.alphas.front();
    std::vector<FitRecord> fits = fit_all(headline);
    for (const auto& rec : fits) {
        write_fit_csv(config.out("fit_" + rec.spec + "_" + rec.depvar + ".csv"), rec);
        write_cv_csv(config.out("cv_" + rec.spec + "_" + rec.depvar + ".csv"), rec.fit.cv);
    }
    emit_tables(fits, depvars, config);

    RunReport report;
    report.fits = fits;
    report.hypotheses = hypothesis_summary(fits, depvars);
    report.assumptions =
        assumption_log(config, precrisis,
                       meta.at("snapshot_end_dates")[precrisis].get<std::string>());

    ordered_json j;
    j["assumptions"] = report.assumptions;
    j["config"] = config.echo();
    j["network"] = meta;
    {
        ordered_json c;
        auto sizes = community_size(partition);
        c["n_communities"] = sizes.size();
        c["sizes"] = sizes;
        if (precrisis_graph.edge_count() > 0)
            c["modularity"] = modularity(precrisis_graph.symmetrize(), partition);
        else
            c["modularity"] = nullptr;
        j["communities"] = c;
    }
    {
        ordered_json m;
        std::vector<std::string> ids;
        for (const auto& col : table.columns) ids.push_back(col.id());
        m["columns"] = ids;
        m["zero_variance_dropped"] = dropped_ids;
        m["notes"] = notes;
        j["metrics"] = m;
    }
    j["targets"] = {{"depvars", depvars}};
    {
        ordered_json f;
        for (const auto& rec : fits) {
            ordered_json one;
            one["alpha"] = rec.fit.alpha;
            one["lambda"] = rec.fit.lambda;
            one["selected"] = ordered_json::array();
            for (const auto& sel : rec.fit.active) {
                auto [level, name] = split_id(sel.name);
                one["selected"].push_back({{"variable", name},
                                           {"level", level},
                                           {"coefficient", sel.coefficient},
                                           {"sign", sel.sign > 0 ? "+" : "-"}});
            }
            f[rec.spec][rec.depvar] = one;
        }
        j["fits"] = f;
    }
    {
        ordered_json h;
        for (const auto& [dv, verdict] : report.hypotheses) h[dv] = verdict;
        j["hypotheses"] = h;
    }
    if (config.alphas.size() > 1) {
        j["extra_alphas"] = std::vector<double>(config.alphas.begin() + 1, config.alphas.end());
        for (size_t a = 1; a < config.alphas.size(); ++a) {
            std::string suffix = "_a" + csv::format(config.alphas[a]);
            for (const auto& rec : fit_all(config.alphas[a])) {
                write_fit_csv(config.out("fit_" + rec.spec + "_" + rec.depvar + suffix + ".csv"),
                              rec);
                write_cv_csv(config.out("cv_" + rec.spec + "_" + rec.depvar + suffix + ".csv"),
                             rec.fit.cv);
            }
        }
    }

    report.json = j;
    write_json_file(config.out("report.json"), j);
    return report;
}

// ---------------------------------------------------------------------------
// orchestration
// ---------------------------------------------------------------------------

namespace {

/// One CLI process per output directory.
class LockFile {
public:
    explicit LockFile(const std::string& path) : path_(path) {
        fd_ = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw ConfigError("output directory is locked by another run ('" + path +
                              "' exists); remove the stale lock if no run is active");
    }
    ~LockFile() {
        if (fd_ >= 0) {
            ::close(fd_);
            ::unlink(path_.c_str());
        }
    }
    LockFile(const LockFile&) = delete;
    LockFile& operator=(const LockFile&) = delete;

private:
    std::string path_;
    int fd_ = -1;
};

std::set<fs::path> dir_entries(const std::string& dir) {
    std::set<fs::path> entries;
    for (const auto& e : fs::directory_iterator(dir)) entries.insert(e.path());
    return entries;
}

template <typename F>
void run_stage(const std::string& name, F&& body) {
    try {
        body();
    } catch (const Error& e) {
        std::string msg = "[stage " + name + "] " + e.what();
        switch (e.kind()) {
        case ErrorKind::Config: throw ConfigError(msg);
        case ErrorKind::Data: throw DataError(msg);
        case ErrorKind::Numerical: throw NumericalError(msg);
        }
        throw;
    }
}

} // namespace

RunReport run_pipeline(const PipelineConfig& config) {
    config.validate();
    fs::create_directories(config.output_dir);
    LockFile lock(config.out(".spillnet.lock"));

    std::set<fs::path> before = dir_entries(config.output_dir);
    try {
        RunReport report;
        run_stage("network", [&] { stage_network(config); });
        run_stage("communities", [&] { stage_communities(config); });
        run_stage("metrics", [&] { stage_metrics(config); });
        run_stage("targets", [&] { stage_targets(config); });
        run_stage("regress", [&] { report = stage_regress(config); });
        return report;
    } catch (...) {
        // Partial outputs of the aborted run are removed.
        for (const auto& e : dir_entries(config.output_dir))
            if (!before.count(e)) fs::remove_all(e);
        throw;
    }
}

} // namespace spillnet
