#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "spillnet/errors.hpp"

namespace spillnet {

/// Firms x metrics regression input. Column names are unique; entries finite.
struct DesignMatrix {
    Eigen::MatrixXd x;              // N x P
    Eigen::VectorXd y;              // N
    std::vector<std::string> names; // P

    void validate() const;
};

/// Standardized copy plus the transform needed to map coefficients back.
struct Standardized {
    Eigen::MatrixXd x;      // columns zero-mean, unit variance (1/N convention)
    Eigen::VectorXd y;      // centered
    Eigen::VectorXd col_mean;
    Eigen::VectorXd col_sd; // population sd, all > 0
    double y_mean = 0.0;
};

/// Columns to zero-mean unit-variance, y centered. A zero-variance column
/// reaching this stage is an error (they are removed upstream with warning).
Standardized standardize(const DesignMatrix& design);

struct CdResult {
    Eigen::VectorXd beta;
    int sweeps = 0;
    std::vector<double> objective; // internal objective after each sweep
};

/// Thrown when the sweep limit is exceeded; carries the last iterate.
class CdNonConvergence : public NumericalError {
public:
    CdNonConvergence(const std::string& what, Eigen::VectorXd iterate)
        : NumericalError(what), last_iterate(std::move(iterate)) {}
    Eigen::VectorXd last_iterate;
};

/// Cyclic coordinate descent for the elastic net on given (x, y), no
/// intercept: beta_j <- S(<x_j, r_j>/N, lambda*alpha) / (<x_j, x_j>/N +
/// lambda*(1-alpha)). The descended objective ||y - x beta||^2/(2N) +
/// lambda[(1-alpha)||beta||^2/2 + alpha||beta||_1] is recorded per sweep and
/// must never increase.
CdResult coordinate_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                            double lambda, Eigen::VectorXd warm_start, double tol = 1e-8,
                            int max_sweeps = 10000);

/// Value of the descended objective at beta (for tests and monotone checks).
double elastic_net_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& beta, double alpha, double lambda);

/// Log-spaced descending grid from lambda_max = max_j |<x_j, y>| / (N alpha)
/// down to lambda_max * min_ratio. Degenerate (lambda_max = 0) is an error.
std::vector<double> lambda_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                                int length = 100, double min_ratio = 1e-3);

enum class LambdaRule { Min, OneSe };

struct EnConfig {
    double alpha = 1.0;              // (0, 1]; 0 is rejected
    std::vector<double> lambda_grid; // descending; empty -> auto path
    int path_length = 100;
    double path_min_ratio = 1e-3;
    int folds = 10;
    unsigned seed = 0;
    double tol = 1e-8;
    int max_sweeps = 10000;
    LambdaRule rule = LambdaRule::Min;

    void validate() const;
};

struct CvCurve {
    std::vector<double> lambda;   // descending
    std::vector<double> mean_mse; // per lambda
    std::vector<double> se_mse;
    size_t chosen = 0; // index into lambda
};

/// Row -> fold map. A function of (n, folds, seed) only, never of content.
std::vector<int> cv_fold_assignment(Eigen::Index n, int folds, unsigned seed);

/// Seeded k-fold CV over the lambda grid with warm starts. Fold assignment
/// depends only on (N, k, seed).
CvCurve cross_validate(const Standardized& design, const EnConfig& config);

struct SelectedVariable {
    std::string name;
    double coefficient = 0.0; // original scale
    int sign = 0;             // +1 or -1
};

struct EnFit {
    double intercept = 0.0;
    Eigen::VectorXd coef; // original scale, exact zeros outside the active set
    double lambda = 0.0;
    double alpha = 1.0;
    CvCurve cv;
    std::vector<SelectedVariable> active;
};

/// standardize -> path -> CV -> refit at the chosen lambda -> back-map.
/// A response orthogonal to every column short-circuits to the trivial fit
/// (empty active set, intercept = mean(y)).
EnFit fit(const DesignMatrix& design, const EnConfig& config);

} // namespace spillnet
