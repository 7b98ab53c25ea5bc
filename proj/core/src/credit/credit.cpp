#include "deforsc/credit/credit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "deforsc/errors.hpp"
#include "deforsc/util/numfmt.hpp"
#include "deforsc/util/stats.hpp"

namespace deforsc {

namespace {

void validate(const CreditInputs& in) {
    if (in.project.empty()) throw DomainError("credit inputs: empty project id");
    if (!(in.baseline_defor > 0.0) || !std::isfinite(in.baseline_defor))
        throw DomainError("credit inputs: project '" + in.project +
                          "' baseline deforestation must be > 0");
    auto nonneg = [&](double v, const char* what) {
        if (v < 0.0 || !std::isfinite(v))
            throw DomainError("credit inputs: project '" + in.project + "' " + what +
                              " must be finite and >= 0");
    };
    nonneg(in.observed_defor, "observed deforestation");
    nonneg(in.sc_defor, "synthetic-control deforestation");
    nonneg(in.exante_credits, "ex-ante credits");
}

bool parse_flag(const std::string& raw, const std::string& path_hint) {
    std::string s;
    for (char c : raw) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "yes" || s == "true" || s == "1") return true;
    if (s == "no" || s == "false" || s == "0") return false;
    throw SchemaError(path_hint + ": cannot parse significance flag '" + raw + "'");
}

}  // namespace

double per_ha_rate(const CreditInputs& in) {
    validate(in);
    return in.exante_credits / in.baseline_defor;
}

double proportional_offsets(const CreditInputs& in) {
    validate(in);
    return in.exante_credits * (in.sc_defor / in.baseline_defor);
}

std::pair<double, double> sc_offsets(const CreditInputs& in) {
    const double rate = per_ha_rate(in);
    if (!in.significant) return {0.0, 0.0};
    const double avoided = std::max(0.0, in.sc_defor - in.observed_defor);
    return {avoided, avoided * rate};
}

CreditRow credit_row(const CreditInputs& in) {
    CreditRow row;
    row.in = in;
    row.per_ha_rate = per_ha_rate(in);
    row.proportional_offsets = proportional_offsets(in);
    row.avoided_ha_raw = std::max(0.0, in.sc_defor - in.observed_defor);
    row.sc_offsets_raw = row.avoided_ha_raw * row.per_ha_rate;
    const auto [avoided, offsets] = sc_offsets(in);
    row.avoided_ha = avoided;
    row.sc_offsets = offsets;
    row.gate_conflict = !in.significant && row.avoided_ha_raw > 0.0;
    return row;
}

CreditLedger aggregate_ledger(const std::vector<CreditInputs>& inputs) {
    if (inputs.empty()) throw DomainError("credit ledger: no input rows");
    std::set<UnitId> seen;
    for (const auto& in : inputs)
        if (!seen.insert(in.project).second)
            throw DomainError("credit ledger: duplicate project id '" + in.project + "'");

    CreditLedger ledger;
    for (const auto& in : inputs) ledger.rows.push_back(credit_row(in));
    std::sort(ledger.rows.begin(), ledger.rows.end(),
              [](const CreditRow& a, const CreditRow& b) { return a.in.project < b.in.project; });

    auto total = [&](auto get) {
        std::vector<double> v;
        for (const auto& r : ledger.rows) v.push_back(get(r));
        return compensated_sum(v);
    };
    ledger.total_exante = total([](const CreditRow& r) { return r.in.exante_credits; });
    ledger.total_proportional = total([](const CreditRow& r) { return r.proportional_offsets; });
    ledger.total_avoided_ha = total([](const CreditRow& r) { return r.avoided_ha; });
    ledger.total_sc_offsets = total([](const CreditRow& r) { return r.sc_offsets; });
    ledger.total_avoided_ha_raw = total([](const CreditRow& r) { return r.avoided_ha_raw; });
    ledger.total_sc_offsets_raw = total([](const CreditRow& r) { return r.sc_offsets_raw; });
    const double nonsig =
        total([](const CreditRow& r) { return r.in.significant ? 0.0 : r.in.exante_credits; });
    ledger.nonsignificant_exante_share =
        ledger.total_exante > 0.0 ? nonsig / ledger.total_exante : 0.0;
    return ledger;
}

std::vector<CreditInputs> parse_credit_inputs(const CsvTable& table) {
    const std::size_t c_country = table.col("country");
    const std::size_t c_project = table.col("project");
    const std::size_t c_obs = table.col("observed_ha");
    const std::size_t c_base = table.col("baseline_ha");
    const std::size_t c_sc = table.col("sc_ha");
    const std::size_t c_exante = table.col("exante_offsets");
    const std::size_t c_sig = table.col("significant");
    const std::size_t c_horizon = table.col_opt("horizon_year");

    std::vector<CreditInputs> inputs;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string where = "credits row " + std::to_string(i + 2);
        CreditInputs in;
        in.country = row[c_country];
        in.project = row[c_project];
        in.observed_defor = parse_double(row[c_obs], where + " observed_ha");
        in.baseline_defor = parse_double(row[c_base], where + " baseline_ha");
        in.sc_defor = parse_double(row[c_sc], where + " sc_ha");
        in.exante_credits = parse_double(row[c_exante], where + " exante_offsets");
        in.significant = parse_flag(row[c_sig], where);
        if (c_horizon != CsvTable::npos && !row[c_horizon].empty())
            in.horizon_year = static_cast<int>(parse_int(row[c_horizon], where + " horizon_year"));
        inputs.push_back(std::move(in));
    }
    return inputs;
}

std::vector<CreditInputs> load_credit_inputs(const std::string& path) {
    return parse_credit_inputs(read_csv(path));
}

CsvTable ledger_to_csv(const CreditLedger& ledger) {
    CsvTable t;
    t.header = {"country",        "project",           "observed_ha", "baseline_ha",
                "sc_ha",          "exante_offsets",    "significant", "per_ha_rate",
                "proportional_offsets", "avoided_ha",  "sc_offsets",  "avoided_ha_raw",
                "sc_offsets_raw", "gate_conflict"};
    for (const auto& r : ledger.rows) {
        t.rows.push_back({r.in.country, r.in.project, fmt_exact(r.in.observed_defor),
                          fmt_exact(r.in.baseline_defor), fmt_exact(r.in.sc_defor),
                          fmt_exact(r.in.exante_credits), r.in.significant ? "yes" : "no",
                          fmt6(r.per_ha_rate), fmt6(r.proportional_offsets), fmt6(r.avoided_ha),
                          fmt6(r.sc_offsets), fmt6(r.avoided_ha_raw), fmt6(r.sc_offsets_raw),
                          r.gate_conflict ? "yes" : "no"});
    }
    t.rows.push_back({"TOTAL", "", "", "", "", fmt6(ledger.total_exante), "", "",
                      fmt6(ledger.total_proportional), fmt6(ledger.total_avoided_ha),
                      fmt6(ledger.total_sc_offsets), fmt6(ledger.total_avoided_ha_raw),
                      fmt6(ledger.total_sc_offsets_raw), ""});
    return t;
}

}  // namespace deforsc
