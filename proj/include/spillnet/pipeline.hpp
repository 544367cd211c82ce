#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "spillnet/elastic_net.hpp"
#include "spillnet/granger.hpp"
#include "spillnet/metrics.hpp"
#include "spillnet/panel.hpp"

namespace spillnet {

/// Full study configuration. JSON schema mirrors this struct; every value
/// has a default except the input paths and the EN seed.
struct PipelineConfig {
    std::string monthly_prices; // networks are built from this panel
    std::string daily_prices;   // targets; empty -> reuse the monthly panel
    std::string sectors;
    std::string output_dir;

    std::vector<CrisisWindow> crisis_windows; // default: 12m and 18m definitions
    int min_consecutive = 36;

    size_t network_window = 48;
    size_t network_step = 12;
    NetworkOptions network; // lag 1, significance 0.05, fdr off

    MetricParams metrics; // m = 2, katz attenuation 0.1

    std::vector<double> alphas = {1.0, 0.5}; // first entry is the headline
    int folds = 10;
    bool seed_set = false;
    unsigned en_seed = 0; // mandatory in the JSON config
    LambdaRule rule = LambdaRule::Min;
    int path_length = 100;
    double path_min_ratio = 0.0; // 0 = auto: 1e-3 when N > P, 1e-2 otherwise
    double en_tol = 1e-5; // selection-grade; tighten for coefficient studies
    int en_max_sweeps = 50000;

    double louvain_resolution = 1.0;
    unsigned louvain_seed = 0;
    bool louvain_shuffle = false;

    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig from_file(const std::string& path);
    nlohmann::ordered_json echo() const;
    void validate() const;

    std::string out(const std::string& name) const; // output_dir + "/" + name
    /// Depvar ids in report order: cr_<label>... then md_<label>...
    std::vector<std::string> depvar_names() const;
    /// Earliest crisis start across the configured windows.
    Date earliest_crisis_start() const;
};

/// One Elastic Net fit inside the report.
struct FitRecord {
    std::string spec;   // "gt", "gt_at", "full"
    std::string depvar; // "cr_12m", ...
    std::vector<std::string> variables; // design column ids, level-tagged
    EnFit fit;
};

struct RunReport {
    std::vector<std::string> assumptions;
    std::vector<FitRecord> fits; // headline alpha, spec-major then depvar order
    std::vector<std::pair<std::string, std::string>> hypotheses; // depvar -> verdict
    nlohmann::ordered_json json; // exactly what report.json contains
};

/// H1 when only LT variables are active in the full model, H2 when only GT,
/// H3 when both, "inconclusive" when neither; classified per depvar.
std::vector<std::pair<std::string, std::string>> hypothesis_summary(
    const std::vector<FitRecord>& fits, const std::vector<std::string>& depvars);

/// One table per specification shaped like the study's result tables:
/// variable + level rows, depvar columns, cells in {+, -, blank}; variables
/// never selected are omitted.
void emit_tables(const std::vector<FitRecord>& fits, const std::vector<std::string>& depvars,
                 const PipelineConfig& config);

// Stages. Each reads its predecessors' persisted outputs from output_dir and
// writes its own, so any stage can be rerun in isolation.
void stage_network(const PipelineConfig& config);
void stage_communities(const PipelineConfig& config);
void stage_metrics(const PipelineConfig& config);
void stage_targets(const PipelineConfig& config);
RunReport stage_regress(const PipelineConfig& config);

/// The full study: network -> communities -> metrics -> targets -> regress.
/// Any stage error aborts with the stage named; files created by the aborted
/// run are removed. Holds a lock file in output_dir for the duration.
RunReport run_pipeline(const PipelineConfig& config);

} // namespace spillnet
