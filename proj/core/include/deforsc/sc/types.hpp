// Shared types for the synthetic-control engine: configuration, fitted
// weights, fit summaries, screening/validation/placebo results.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deforsc/panel.hpp"

namespace deforsc {

struct ScConfig {
    // Predictor names: static covariates, dynamic covariates (pre-treatment
    // means), or the outcome aggregates "defor_annual_mean"/"defor_cum_mean".
    // Empty = both aggregates plus every covariate the project unit carries.
    std::vector<std::string> covariates;

    // Donor screening: dynamic covariate measuring clearing pressure around a
    // unit, band half-width as a fraction of the project's value, and the
    // widening schedule used when validation fails.
    std::string pressure_covariate = "buffer_defor_1";
    double pressure_tolerance_init = 0.10;
    double pressure_tolerance_step = 0.10;
    double pressure_tolerance_max = 1.00;

    // Split-sample validation: pass when |terminal gap| / area is below this.
    double validation_threshold = 0.005;
    int min_validation_pre_years = 4;

    // Placebo screening: drop placebos whose pre-treatment MSPE exceeds this
    // multiple of the project's.
    double mspe_discard_ratio = 5.0;

    // Outer covariate-weight search (Nelder-Mead over softmax weights).
    int outer_starts = 4;        // random restarts on top of the fixed candidates
    int outer_evaluations = 300; // objective-evaluation budget per start
    double outer_tol = 1e-10;

    // Inner simplex-constrained QP.
    double qp_tol = 1e-10;
    int qp_max_iterations = 0;   // 0 = automatic

    std::uint64_t seed = 42;
};

// Donor and covariate weights; both live on the unit simplex (non-negative,
// summing to one within 1e-9).
struct ScWeights {
    std::map<UnitId, double> donor_weights;
    std::map<std::string, double> covariate_weights;
};

struct ScFit {
    ScWeights weights;
    UnitId treated_id;
    int treatment_year = 0;      // pre period is [panel start, treatment_year)

    // Cumulative deforestation (ha) over the full panel span.
    OutcomeSeries treated_cumulative;
    OutcomeSeries synthetic_cumulative;
    OutcomeSeries gap;           // treated - synthetic

    double mspe_pre = 0.0;       // mean squared cumulative gap, pre years
    double mspe_post = 0.0;      // ditto, treated years (0 when none)

    // Predictor bookkeeping for balance tables and diagnostics: names in fit
    // order (named covariates first, then cum_defor@YYYY path rows).
    std::vector<std::string> predictor_names;
    std::vector<std::string> dropped_predictors;  // zero variance across units
    std::vector<UnitId> donor_ids;                // fit order
    double qp_kkt_residual = 0.0;
    std::vector<std::string> notes;
};

struct ScreenResult {
    std::vector<UnitId> donor_ids;   // lexicographic
    double tolerance = 0.0;          // band half-width actually used
    double project_pressure = 0.0;
    std::map<UnitId, double> pool_pressures;
};

struct ValidationResult {
    bool passes = false;
    int final_year = 0;                 // last pre-treatment year
    double project_cum_ha = 0.0;        // cumulative deforestation at final_year
    double synthetic_cum_ha = 0.0;
    double terminal_gap_ha = 0.0;       // signed, project - synthetic
    double terminal_gap_pct_area = 0.0; // 100 * gap / area
    int n_train_years = 0;
    int n_test_years = 0;
};

struct PlaceboFit {
    UnitId id;
    double mspe_pre = 0.0;
    OutcomeSeries gap;
    bool discarded = false;
};

struct PlaceboReport {
    std::vector<PlaceboFit> fits;    // one per donor, lexicographic
    int n_retained = 0;

    // Per post-treatment year (treatment_year .. panel end).
    std::vector<int> years;
    std::vector<double> band_mean, band_lo, band_hi;
    std::vector<double> project_gap;
    std::vector<bool> exceeds;

    bool inconclusive = false;       // every placebo discarded
    bool significant = false;        // terminal-year gap outside the 95% band
};

// One row of the covariate balance table.
struct BalanceRow {
    std::string name;
    double v_weight = 0.0;
    double project = 0.0;
    double synthetic = 0.0;
    double donor_mean = 0.0;
};

// Screening + validation + final fit, as produced by fit_project.
struct ScProjectResult {
    ScFit fit;
    ScreenResult screen;
    ValidationResult validation;
    bool validation_ran = false;
    bool validated = false;        // validation_ran && validation.passes
};

}  // namespace deforsc
