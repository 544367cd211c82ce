// spillnet: recover a Granger spillover network from return panels, segment
// it into communities, compute multilevel topological metrics, and fit
// Elastic Net regressions of crisis vulnerability on those metrics.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include "spillnet/pipeline.hpp"

namespace {

struct Overrides {
    std::optional<std::string> monthly_prices, daily_prices, sectors, output_dir;
    std::optional<double> significance;
    std::optional<int> lag;
    std::optional<size_t> window, step;
    std::optional<bool> fdr;
    std::optional<int> min_consecutive;
    std::optional<int> reach_m;
    std::optional<double> katz_attenuation;
    std::vector<double> alphas;
    std::optional<int> folds;
    std::optional<unsigned> seed;
    std::optional<std::string> lambda_rule;
    std::optional<double> resolution;
    std::optional<unsigned> louvain_seed;
    std::optional<bool> louvain_shuffle;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--monthly-prices", o.monthly_prices, "Price CSV for network building");
    cmd->add_option("--daily-prices", o.daily_prices, "Price CSV for the dependent variables");
    cmd->add_option("--sectors", o.sectors, "Sector CSV (ticker,sector)");
    cmd->add_option("--output-dir", o.output_dir, "Output directory");
    cmd->add_option("--significance", o.significance, "Granger significance level");
    cmd->add_option("--lag", o.lag, "VAR lag order");
    cmd->add_option("--window", o.window, "Rolling window length (observations)");
    cmd->add_option("--step", o.step, "Rolling window step");
    cmd->add_option("--fdr", o.fdr, "Benjamini-Hochberg FDR switch");
    cmd->add_option("--min-consecutive", o.min_consecutive, "Sample filter: minimum run length");
    cmd->add_option("--m", o.reach_m, "m for the reach metrics");
    cmd->add_option("--katz-attenuation", o.katz_attenuation, "Katz attenuation factor");
    cmd->add_option("--alpha", o.alphas, "Elastic net alpha(s); first is the headline");
    cmd->add_option("--folds", o.folds, "CV fold count");
    cmd->add_option("--seed", o.seed, "CV fold seed");
    cmd->add_option("--lambda-rule", o.lambda_rule, "Lambda rule: min or one-se");
    cmd->add_option("--resolution", o.resolution, "Louvain resolution");
    cmd->add_option("--louvain-seed", o.louvain_seed, "Louvain sweep seed");
    cmd->add_option("--louvain-shuffle", o.louvain_shuffle, "Shuffle Louvain sweep order");
}

spillnet::PipelineConfig apply_overrides(const std::string& config_path, const Overrides& o) {
    spillnet::PipelineConfig c = spillnet::PipelineConfig::from_file(config_path);
    if (o.monthly_prices) c.monthly_prices = *o.monthly_prices;
    if (o.daily_prices) c.daily_prices = *o.daily_prices;
    if (o.sectors) c.sectors = *o.sectors;
    if (o.output_dir) c.output_dir = *o.output_dir;
    if (o.significance) c.network.significance = *o.significance;
    if (o.lag) c.network.lag = *o.lag;
    if (o.window) c.network_window = *o.window;
    if (o.step) c.network_step = *o.step;
    if (o.fdr) c.network.fdr = *o.fdr;
    if (o.min_consecutive) c.min_consecutive = *o.min_consecutive;
    if (o.reach_m) c.metrics.reach_m = *o.reach_m;
    if (o.katz_attenuation) c.metrics.katz_attenuation = *o.katz_attenuation;
    if (!o.alphas.empty()) c.alphas = o.alphas;
    if (o.folds) c.folds = *o.folds;
    if (o.seed) c.en_seed = *o.seed;
    if (o.lambda_rule) {
        if (*o.lambda_rule == "min")
            c.rule = spillnet::LambdaRule::Min;
        else if (*o.lambda_rule == "one-se")
            c.rule = spillnet::LambdaRule::OneSe;
        else
            throw spillnet::ConfigError("--lambda-rule must be 'min' or 'one-se'");
    }
    if (o.resolution) c.louvain_resolution = *o.resolution;
    if (o.louvain_seed) c.louvain_seed = *o.louvain_seed;
    if (o.louvain_shuffle) c.louvain_shuffle = *o.louvain_shuffle;
    c.validate();
    return c;
}

void print_summary(const spillnet::RunReport& report) {
    std::printf("hypothesis verdicts (full model):\n");
    for (const auto& [depvar, verdict] : report.hypotheses)
        std::printf("  %-8s %s\n", depvar.c_str(), verdict.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spillnet: spillover-network vulnerability study"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file")->required();

    Overrides o;
    const char* stages[] = {"network", "communities", "metrics", "targets", "regress", "run"};
    const char* descr[] = {
        "Filter the panel and build rolling Granger network snapshots",
        "Louvain communities on the pre-crisis snapshot",
        "Multilevel metric table and its correlation matrix",
        "Cumulative returns and maximum drawdowns per crisis window",
        "Elastic Net fits, result tables, hypothesis verdicts, report.json",
        "Full pipeline: network, communities, metrics, targets, regress"};
    for (int i = 0; i < 6; ++i) add_override_flags(app.add_subcommand(stages[i], descr[i]), o);

    CLI11_PARSE(app, argc, argv);

    try {
        spillnet::PipelineConfig config = apply_overrides(config_path, o);
        std::string stage = app.get_subcommands().front()->get_name();
        if (stage == "run") {
            print_summary(spillnet::run_pipeline(config));
        } else if (stage == "network") {
            spillnet::stage_network(config);
        } else if (stage == "communities") {
            spillnet::stage_communities(config);
        } else if (stage == "metrics") {
            spillnet::stage_metrics(config);
        } else if (stage == "targets") {
            spillnet::stage_targets(config);
        } else if (stage == "regress") {
            print_summary(spillnet::stage_regress(config));
        }
        return 0;
    } catch (const spillnet::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
