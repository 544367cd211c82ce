#include "spillnet/elastic_net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace spillnet {

void DesignMatrix::validate() const {
    if (x.rows() != y.size()) throw DataError("design rows and response length differ");
    if (static_cast<size_t>(x.cols()) != names.size())
        throw DataError("design columns and name count differ");
    if (!x.allFinite() || !y.allFinite()) throw DataError("design contains missing entries");
    std::set<std::string> seen(names.begin(), names.end());
    if (seen.size() != names.size()) throw DataError("duplicate column names in design");
}

void EnConfig::validate() const {
    if (alpha <= 0.0 || alpha > 1.0)
        throw ConfigError("alpha must lie in (0, 1]; pure ridge (alpha = 0) is unsupported");
    if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
    if (tol <= 0.0 || max_sweeps < 1) throw ConfigError("bad convergence settings");
    if (path_length < 1 || path_min_ratio <= 0.0 || path_min_ratio > 1.0)
        throw ConfigError("bad lambda path settings");
    for (size_t i = 1; i < lambda_grid.size(); ++i)
        if (!(lambda_grid[i] < lambda_grid[i - 1]))
            throw ConfigError("lambda grid must be strictly descending");
    for (double l : lambda_grid)
        if (l <= 0.0) throw ConfigError("lambda grid must be positive");
}

Standardized standardize(const DesignMatrix& design) {
    design.validate();
    const auto n = design.x.rows();
    const auto p = design.x.cols();
    if (n < 2) throw DataError("standardize needs at least 2 rows");

    Standardized s;
    s.x.resize(n, p);
    s.col_mean.resize(p);
    s.col_sd.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double mean = design.x.col(j).mean();
        Eigen::VectorXd c = design.x.col(j).array() - mean;
        double sd = std::sqrt(c.squaredNorm() / static_cast<double>(n));
        if (sd == 0.0)
            throw DataError("zero-variance column '" + design.names[j] +
                            "' reached standardize; remove it upstream");
        s.col_mean(j) = mean;
        s.col_sd(j) = sd;
        s.x.col(j) = c / sd;
    }
    s.y_mean = design.y.mean();
    s.y = design.y.array() - s.y_mean;
    return s;
}

namespace {

double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

} // namespace

double elastic_net_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& beta, double alpha, double lambda) {
    const double n = static_cast<double>(x.rows());
    double rss = (y - x * beta).squaredNorm();
    return rss / (2.0 * n) +
           lambda * ((1.0 - alpha) * beta.squaredNorm() / 2.0 + alpha * beta.lpNorm<1>());
}

CdResult coordinate_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                            double lambda, Eigen::VectorXd warm_start, double tol,
                            int max_sweeps) {
    if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("alpha must lie in (0, 1]");
    if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (warm_start.size() == 0) warm_start = Eigen::VectorXd::Zero(p);
    if (warm_start.size() != p) throw DataError("warm start has wrong length");

    Eigen::VectorXd col_sq(p);
    for (Eigen::Index j = 0; j < p; ++j) col_sq(j) = x.col(j).squaredNorm() / n;

    CdResult res;
    res.beta = std::move(warm_start);
    Eigen::VectorXd r = y - x * res.beta;
    double prev_obj = std::numeric_limits<double>::infinity();

    // Two-loop scheme: polish the current active set until stable, then run
    // a full sweep to let new coordinates in; converged when a full sweep
    // itself is stable.
    bool full_pass = true;
    int stalled = 0;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        const bool was_full = full_pass;
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (!was_full && res.beta(j) == 0.0) continue;
            if (col_sq(j) == 0.0) continue; // flat column can never enter
            double rho = x.col(j).dot(r) / n + res.beta(j) * col_sq(j);
            double thr = lambda * alpha;
            // Entry barrier: a zero coefficient activates only when its
            // gradient clears the threshold beyond rounding noise. Exact
            // duplicates of an active column sit exactly at |rho| = thr and
            // must not drift in on 1e-16 wobble.
            if (res.beta(j) == 0.0 && std::abs(rho) <= thr * (1.0 + 1e-12)) continue;
            double bj = soft_threshold(rho, thr) / (col_sq(j) + lambda * (1.0 - alpha));
            double change = bj - res.beta(j);
            if (change != 0.0) {
                r -= x.col(j) * change;
                res.beta(j) = bj;
                max_change = std::max(max_change, std::abs(change));
            }
        }
        res.sweeps = sweep;
        double obj = elastic_net_objective(x, y, res.beta, alpha, lambda);
        if (obj > prev_obj + 1e-12 * std::max(1.0, std::abs(prev_obj)))
            throw NumericalError("elastic net objective increased across a sweep");
        // Near-collinear active sets can keep shuffling coefficient mass
        // after the objective has reached its double-precision floor; once
        // full sweeps stop moving the objective by even an ulp, the iterate
        // is as optimal as the arithmetic allows.
        if (prev_obj - obj <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(obj))
            ++stalled;
        else
            stalled = 0;
        prev_obj = obj;
        res.objective.push_back(obj);
        if (max_change < tol || stalled >= 3) {
            if (was_full) return res;
            full_pass = true; // active set stable: confirm with a full sweep
        } else {
            full_pass = false;
        }
    }
    throw CdNonConvergence("coordinate descent did not converge in " +
                               std::to_string(max_sweeps) + " sweeps",
                           res.beta);
}

std::vector<double> lambda_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                                int length, double min_ratio) {
    if (alpha <= 0.0 || alpha > 1.0)
        throw ConfigError("lambda path requires alpha in (0, 1]; the study uses 0.5 and 1");
    if (length < 1) throw ConfigError("path length must be >= 1");
    const double n = static_cast<double>(x.rows());
    double max_corr = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        max_corr = std::max(max_corr, std::abs(x.col(j).dot(y)) / n);
    double lambda_max = max_corr / alpha;
    if (lambda_max == 0.0)
        throw DataError("degenerate lambda path: response orthogonal to every column");

    std::vector<double> grid(length);
    if (length == 1) {
        grid[0] = lambda_max;
        return grid;
    }
    double log_max = std::log(lambda_max);
    double log_min = std::log(lambda_max * min_ratio);
    for (int i = 0; i < length; ++i)
        grid[i] = std::exp(log_max + (log_min - log_max) * i / (length - 1));
    return grid;
}

std::vector<int> cv_fold_assignment(Eigen::Index n, int folds, unsigned seed) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> fold(n);
    for (Eigen::Index i = 0; i < n; ++i) fold[order[i]] = static_cast<int>(i % folds);
    return fold;
}

namespace {

// Path fit on (x, y) with an intercept handled by centering on these rows.
// Returns per-lambda coefficients (on the passed scale) and intercepts.
struct PathFit {
    std::vector<Eigen::VectorXd> beta;
    std::vector<double> intercept;
};

PathFit fit_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                 const std::vector<double>& grid, double alpha, double tol, int max_sweeps) {
    PathFit out;
    Eigen::RowVectorXd xm = x.colwise().mean();
    double ym = y.mean();
    Eigen::MatrixXd xc = x.rowwise() - xm;
    Eigen::VectorXd yc = y.array() - ym;

    Eigen::VectorXd warm = Eigen::VectorXd::Zero(x.cols());
    for (double lambda : grid) {
        CdResult r = coordinate_descent(xc, yc, alpha, lambda, warm, tol, max_sweeps);
        warm = r.beta;
        out.intercept.push_back(ym - xm.dot(r.beta));
        out.beta.push_back(std::move(r.beta));
    }
    return out;
}

} // namespace

CvCurve cross_validate(const Standardized& design, const EnConfig& config) {
    config.validate();
    const Eigen::Index n = design.x.rows();
    if (n < config.folds) throw DataError("fewer rows than folds");

    std::vector<double> grid = config.lambda_grid;
    if (grid.empty())
        grid = lambda_path(design.x, design.y, config.alpha, config.path_length,
                           config.path_min_ratio);

    std::vector<int> fold = cv_fold_assignment(n, config.folds, config.seed);

    // fold-major, reduced in fold-index order
    std::vector<std::vector<double>> fold_mse(config.folds,
                                              std::vector<double>(grid.size(), 0.0));
    for (int f = 0; f < config.folds; ++f) {
        std::vector<int> train, test;
        for (Eigen::Index i = 0; i < n; ++i) (fold[i] == f ? test : train).push_back(static_cast<int>(i));
        if (test.empty()) throw DataError("empty held-out fold");

        Eigen::MatrixXd xtr(train.size(), design.x.cols()), xte(test.size(), design.x.cols());
        Eigen::VectorXd ytr(train.size()), yte(test.size());
        for (size_t i = 0; i < train.size(); ++i) {
            xtr.row(i) = design.x.row(train[i]);
            ytr(i) = design.y(train[i]);
        }
        for (size_t i = 0; i < test.size(); ++i) {
            xte.row(i) = design.x.row(test[i]);
            yte(i) = design.y(test[i]);
        }

        PathFit path = fit_path(xtr, ytr, grid, config.alpha, config.tol, config.max_sweeps);
        for (size_t g = 0; g < grid.size(); ++g) {
            Eigen::VectorXd pred = (xte * path.beta[g]).array() + path.intercept[g];
            fold_mse[f][g] = (yte - pred).squaredNorm() / static_cast<double>(test.size());
        }
    }

    CvCurve curve;
    curve.lambda = grid;
    curve.mean_mse.resize(grid.size());
    curve.se_mse.resize(grid.size());
    for (size_t g = 0; g < grid.size(); ++g) {
        double mean = 0.0;
        for (int f = 0; f < config.folds; ++f) mean += fold_mse[f][g];
        mean /= config.folds;
        double var = 0.0;
        for (int f = 0; f < config.folds; ++f) {
            double d = fold_mse[f][g] - mean;
            var += d * d;
        }
        var /= (config.folds - 1);
        curve.mean_mse[g] = mean;
        curve.se_mse[g] = std::sqrt(var / config.folds);
    }

    size_t best = 0;
    for (size_t g = 1; g < grid.size(); ++g)
        if (curve.mean_mse[g] < curve.mean_mse[best]) best = g;
    if (config.rule == LambdaRule::Min) {
        curve.chosen = best;
    } else {
        double cutoff = curve.mean_mse[best] + curve.se_mse[best];
        size_t pick = best;
        for (size_t g = 0; g <= best; ++g) { // grid descends: first qualifying = largest lambda
            if (curve.mean_mse[g] <= cutoff) {
                pick = g;
                break;
            }
        }
        curve.chosen = pick;
    }
    return curve;
}

EnFit fit(const DesignMatrix& design, const EnConfig& config) {
    config.validate();
    design.validate();
    if (design.x.rows() < config.folds) throw DataError("fewer rows than folds");

    Standardized std_design = standardize(design);

    EnFit out;
    out.alpha = config.alpha;

    // Response orthogonal to every column (e.g. all-zero y): trivial fit.
    double max_corr = 0.0;
    for (Eigen::Index j = 0; j < std_design.x.cols(); ++j)
        max_corr = std::max(max_corr,
                            std::abs(std_design.x.col(j).dot(std_design.y)) /
                                static_cast<double>(std_design.x.rows()));
    if (max_corr == 0.0 && config.lambda_grid.empty()) {
        out.intercept = std_design.y_mean;
        out.coef = Eigen::VectorXd::Zero(design.x.cols());
        out.lambda = 0.0;
        return out;
    }

    out.cv = cross_validate(std_design, config);
    out.lambda = out.cv.lambda[out.cv.chosen];

    // Refit on the full standardized data, warm-starting down the path.
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(std_design.x.cols());
    Eigen::VectorXd beta_std;
    for (size_t g = 0; g <= out.cv.chosen; ++g) {
        CdResult r = coordinate_descent(std_design.x, std_design.y, config.alpha,
                                        out.cv.lambda[g], warm, config.tol, config.max_sweeps);
        warm = r.beta;
    }
    beta_std = warm;

    out.coef = (beta_std.array() / std_design.col_sd.array()).matrix();
    out.intercept = std_design.y_mean - out.coef.dot(std_design.col_mean);
    for (Eigen::Index j = 0; j < out.coef.size(); ++j) {
        if (beta_std(j) == 0.0) {
            out.coef(j) = 0.0; // keep exact zeros exact through the rescale
            continue;
        }
        out.active.push_back({design.names[j], out.coef(j), out.coef(j) > 0.0 ? +1 : -1});
    }
    return out;
}

} // namespace spillnet
