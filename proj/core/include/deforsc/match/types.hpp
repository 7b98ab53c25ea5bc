// Types shared by the matching-based robustness checks.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deforsc/panel.hpp"

namespace deforsc {

struct MatchControl {
    UnitId id;
    double weight = 0.0;
};

// A treated unit's matched control set; weights sum to one.
struct MatchSet {
    UnitId treated;
    std::vector<MatchControl> controls;
    std::string method;
    int treatment_year = 0;
    int lead = 0;  // panel matching only; 0 for genetic matching
};

struct BalanceEntry {
    std::string covariate;
    double smd_before = 0.0;  // treated vs candidate-pool mean
    double smd_after = 0.0;   // treated vs matched mean
};

// --- genetic matching ---

struct GeneticConfig {
    int n_controls = 10;
    // Predictor names as understood by the SC engine (statics, dynamic
    // pre-means, outcome aggregates); empty = auto set.
    std::vector<std::string> covariates;
    int population = 50;
    int generations = 100;
    int tournament = 3;
    double mutation_sd = 0.1;   // on log-weights
    int elites = 2;
    std::uint64_t seed = 42;
};

struct GeneticMatchResult {
    MatchSet matches;
    std::vector<BalanceEntry> balance;
    std::vector<std::string> covariates;     // kept (non-constant) covariates
    std::vector<double> metric_weights;      // diagonal metric, same order
    double fitness = 0.0;                    // worst |SMD| after matching
    std::vector<double> best_by_generation;  // non-increasing
};

// --- panel matching ---

enum class PanelMatchMethod { Mahalanobis, PsMatch, PsWeight };

struct PanelMatchConfig {
    PanelMatchMethod method = PanelMatchMethod::Mahalanobis;
    int max_controls = 10;
    int history_window = 5;   // years of covariate/outcome history
    int max_lead = 5;         // evaluation periods after treatment
    // Dynamic covariates whose history enters the similarity; empty = all.
    std::vector<std::string> covariates;
    double ridge = 1e-6;
    int bootstrap_runs = 500;
    std::uint64_t seed = 42;
};

struct PanelMatchResult {
    std::vector<MatchSet> sets;       // lead-major, treated id ascending
    std::vector<std::string> notes;   // skipped treated units and why
};

struct PanelAttRow {
    int lead = 0;
    int n_treated = 0;
    double att_ha = 0.0, se_ha = 0.0, ci_lo_ha = 0.0, ci_hi_ha = 0.0;
    double att_pct = 0.0, se_pct = 0.0, ci_lo_pct = 0.0, ci_hi_pct = 0.0;
};

}  // namespace deforsc
