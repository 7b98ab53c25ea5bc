// Types for the generalized synthetic-control engine (interactive fixed
// effects and matrix completion).
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "deforsc/panel.hpp"

namespace deforsc {

enum class GscEstimator { Ife, MatrixCompletion };
enum class OutcomeScale { PercentPerYear, HaPerYear };

struct GscConfig {
    GscEstimator estimator = GscEstimator::MatrixCompletion;
    OutcomeScale scale = OutcomeScale::PercentPerYear;

    // Number of factors (IFE) / regularisation index (MC). -1 cross-validates
    // over factor_min..factor_max on masked control pre-treatment cells.
    int factors = -1;
    int factor_min = 0;
    int factor_max = 5;
    int cv_folds = 5;

    int bootstrap_runs = 1000;

    // Time-varying covariates entering X_it * beta; empty = every dynamic
    // covariate in the panel (sorted by name).
    std::vector<std::string> covariates;

    int als_max_iterations = 2000;
    double als_tol = 1e-9;
    std::uint64_t seed = 42;
};

// Fitted model: Y_it = alpha_i + xi_t + X_it'beta + lambda_i'f_t + eps_it,
// with mean(alpha) = 0 (the common level lives in xi) and F'F/T = I.
struct GscModel {
    std::vector<UnitId> unit_ids;   // row order
    std::vector<int> years;         // column order
    std::vector<std::string> covariate_names;

    Eigen::VectorXd alpha;          // n
    Eigen::VectorXd xi;             // T
    Eigen::VectorXd beta;           // k
    Eigen::MatrixXd lambda;         // n x rank
    Eigen::MatrixXd factors;        // T x rank, factors'factors / T = I

    int rank = 0;
    double soft_threshold = 0.0;    // matrix completion only
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;         // observed-cell SSE at convergence

    // Systematic part alpha_i + xi_t + X'beta + lambda'f for a fitted row.
    Eigen::VectorXd fitted_row(int row, const std::vector<Eigen::MatrixXd>& X) const;
};

struct AttRow {
    int lead = 0;        // treatment year has lead 1; lead 0 is the last pre year
    double att = 0.0;
    double se = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double p = 1.0;
    int n_projects = 0;  // 0 for leads <= 0 by convention
};

struct GscResult {
    GscModel model;
    int selected_factors = 0;        // hyper-parameter index actually used
    std::vector<double> cv_mse;      // per candidate (empty when factors fixed)

    std::vector<AttRow> rows;        // all observed leads, ascending
    double mean_att = 0.0;           // n-weighted over leads >= 1
    double mean_se = 0.0;
    double mean_ci_lo = 0.0;
    double mean_ci_hi = 0.0;
    double mean_p = 1.0;

    double pre_mean_att = 0.0;       // diagnostic over leads <= 0
    double pre_mean_se = 0.0;

    int n_treated = 0;
    int n_controls = 0;

    // Per treated unit, on the configured outcome scale, full panel span.
    std::map<UnitId, OutcomeSeries> counterfactual;
    std::map<UnitId, OutcomeSeries> effect;   // observed - counterfactual
};

}  // namespace deforsc
