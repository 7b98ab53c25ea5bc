// Report bundle emission. The reporter formats stage outputs into plot-ready
// CSV/JSON files — it never recomputes a number. Every float goes through the
// 6-significant-digit formatter so reruns are byte-identical.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "deforsc/credit/credit.hpp"
#include "deforsc/gsc/types.hpp"
#include "deforsc/match/types.hpp"
#include "deforsc/panel.hpp"
#include "deforsc/sc/types.hpp"
#include "deforsc/util/csv.hpp"

namespace deforsc {

// Everything one project accumulated across the SC stages.
struct ProjectReport {
    UnitId id;
    ScProjectResult sc;
    std::optional<PlaceboReport> placebo;
    std::vector<BalanceRow> balance;
    // Ex-ante baseline as a cumulative series (for the three-series
    // trajectory file); absent when no crediting inputs cover the project.
    std::optional<OutcomeSeries> baseline_cumulative;
};

struct ReportBundle {
    std::vector<ProjectReport> projects;
    std::optional<GscResult> gsc;
    std::optional<PanelMatchResult> matches;
    std::vector<PanelAttRow> panel_att;  // empty = stage absent
    std::vector<std::pair<UnitId, GeneticMatchResult>> genetic;
    std::optional<CreditLedger> credit;
};

// Per-lead ATT table: lead, att, std_err, ci_lower, ci_upper, p_value,
// n_projects, plus a final "mean" row.
CsvTable att_table(const GscResult& res);

// Dual-scale (ha and % of area) per-lead table from panel matching.
CsvTable panel_att_table(const std::vector<PanelAttRow>& rows);

// Covariate | V-weights | Project area | Synthetic control | Control set
// average.
CsvTable balance_table_csv(const std::vector<BalanceRow>& rows);

// One row per project: final pre-treatment year levels and the 0.5% verdict.
CsvTable validation_table(const std::vector<std::pair<UnitId, ValidationResult>>& rows);

// Cumulative trajectories: observed, synthetic, and (optional) ex-ante
// baseline per year.
CsvTable trajectory_table(const ScFit& fit, const OutcomeSeries* baseline);

// Gap series with the placebo band; band cells are empty before treatment,
// when no placebo report exists, or when it is inconclusive.
CsvTable gap_table(const ScFit& fit, const PlaceboReport* placebo);

// SMD before/after matching.
CsvTable match_balance_table(const std::vector<BalanceEntry>& entries);

// All matched sets (panel methods + genetic) as one JSON document.
nlohmann::json matchsets_json(const ReportBundle& bundle);

// Machine-readable run overview; notes absent stages.
nlohmann::json summary_json(const ReportBundle& bundle);

// Write every applicable file into out_dir; returns the relative names, in
// emission order. Creates out_dir if needed.
std::vector<std::string> write_report(const ReportBundle& bundle, const std::string& out_dir);

}  // namespace deforsc
