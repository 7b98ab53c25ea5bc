// Carbon-offset arithmetic. Credits scale linearly with avoided hectares:
// the per-hectare rate is the project's ex-ante credit volume divided by its
// ex-ante baseline deforestation. Ex-post offsets replace the baseline with
// the synthetic-control deforestation and are gated on the placebo verdict:
// projects without evidence of significant reductions are credited zero.
// Rows where that gate flips a nonzero value to zero carry a conflict flag,
// and the ungated (clamp-only) values are kept alongside the gated ones.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "deforsc/panel.hpp"
#include "deforsc/util/csv.hpp"

namespace deforsc {

struct CreditInputs {
    std::string country;
    UnitId project;
    double observed_defor = 0.0;   // cumulative ha through the horizon
    double baseline_defor = 0.0;   // ex-ante cumulative ha; must be > 0
    double sc_defor = 0.0;         // synthetic-control cumulative ha
    double exante_credits = 0.0;   // Mg CO2 through the horizon
    bool significant = false;      // placebo verdict from the SC analysis
    int horizon_year = 2020;
};

struct CreditRow {
    CreditInputs in;
    double per_ha_rate = 0.0;          // Mg CO2 per ha
    double proportional_offsets = 0.0; // exante * sc / baseline
    double avoided_ha = 0.0;           // gated: 0 unless significant
    double sc_offsets = 0.0;           // gated: 0 unless significant
    double avoided_ha_raw = 0.0;       // max(0, sc - observed), ungated
    double sc_offsets_raw = 0.0;       // avoided_ha_raw * per_ha_rate
    bool gate_conflict = false;        // gate zeroed a nonzero raw value
};

struct CreditLedger {
    std::vector<CreditRow> rows;  // sorted by project id
    double total_exante = 0.0;
    double total_proportional = 0.0;
    double total_avoided_ha = 0.0;
    double total_sc_offsets = 0.0;
    double total_avoided_ha_raw = 0.0;
    double total_sc_offsets_raw = 0.0;
    // Fraction of ex-ante credits from projects without significant
    // reductions.
    double nonsignificant_exante_share = 0.0;
};

// Mg CO2 per avoided hectare. Throws DomainError on a non-positive baseline.
double per_ha_rate(const CreditInputs& in);

// Ex-ante credits rescaled by the synthetic-control/baseline ratio.
double proportional_offsets(const CreditInputs& in);

// (avoided ha, Mg CO2), gated: (0, 0) when not significant, otherwise the
// clamped difference max(0, sc - observed) at the per-hectare rate.
std::pair<double, double> sc_offsets(const CreditInputs& in);

// All derived columns for one project.
CreditRow credit_row(const CreditInputs& in);

// Full ledger with compensated totals; input order does not matter. Throws
// DomainError on empty input or duplicate project ids.
CreditLedger aggregate_ledger(const std::vector<CreditInputs>& inputs);

// CSV plumbing. Input columns (mirroring the ledger layout left-to-right):
// country, project, observed_ha, baseline_ha, sc_ha, exante_offsets,
// significant [, horizon_year]. The emitted ledger echoes those columns and
// appends the computed ones plus a TOTAL row.
std::vector<CreditInputs> parse_credit_inputs(const CsvTable& table);
std::vector<CreditInputs> load_credit_inputs(const std::string& path);
CsvTable ledger_to_csv(const CreditLedger& ledger);

}  // namespace deforsc
