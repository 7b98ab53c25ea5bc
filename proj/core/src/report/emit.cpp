#include "deforsc/report/emit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "deforsc/errors.hpp"
#include "deforsc/util/numfmt.hpp"

namespace deforsc {

namespace {

using nlohmann::json;

// NaN/inf are not representable in JSON; emit null.
json jnum(double v) {
    if (!std::isfinite(v)) return nullptr;
    return round6(v);
}

std::string yesno(bool b) { return b ? "yes" : "no"; }

// Unit ids are opaque strings; keep file names shell-safe.
std::string safe_name(const std::string& id) {
    std::string out;
    for (char c : id)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c
                                                                                          : '_');
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace

CsvTable att_table(const GscResult& res) {
    CsvTable t;
    t.header = {"lead", "att", "std_err", "ci_lower", "ci_upper", "p_value", "n_projects"};
    for (const auto& r : res.rows)
        t.rows.push_back({fmt_int(r.lead), fmt6(r.att), fmt6(r.se), fmt6(r.ci_lo), fmt6(r.ci_hi),
                          fmt6(r.p), fmt_int(r.n_projects)});
    t.rows.push_back({"mean", fmt6(res.mean_att), fmt6(res.mean_se), fmt6(res.mean_ci_lo),
                      fmt6(res.mean_ci_hi), fmt6(res.mean_p), "-"});
    return t;
}

CsvTable panel_att_table(const std::vector<PanelAttRow>& rows) {
    CsvTable t;
    t.header = {"lead",  "n_treated", "att_ha",  "std_err_ha",  "ci_lower_ha",  "ci_upper_ha",
                "att_pct", "std_err_pct", "ci_lower_pct", "ci_upper_pct"};
    for (const auto& r : rows)
        t.rows.push_back({fmt_int(r.lead), fmt_int(r.n_treated), fmt6(r.att_ha), fmt6(r.se_ha),
                          fmt6(r.ci_lo_ha), fmt6(r.ci_hi_ha), fmt6(r.att_pct), fmt6(r.se_pct),
                          fmt6(r.ci_lo_pct), fmt6(r.ci_hi_pct)});
    return t;
}

CsvTable balance_table_csv(const std::vector<BalanceRow>& rows) {
    CsvTable t;
    t.header = {"covariate", "v_weight", "project", "synthetic", "control_mean"};
    for (const auto& r : rows)
        t.rows.push_back(
            {r.name, fmt6(r.v_weight), fmt6(r.project), fmt6(r.synthetic), fmt6(r.donor_mean)});
    return t;
}

CsvTable validation_table(const std::vector<std::pair<UnitId, ValidationResult>>& rows) {
    CsvTable t;
    t.header = {"project", "final_year", "project_ha", "sc_ha", "diff_ha", "diff_pct_area", "pass"};
    for (const auto& [id, v] : rows)
        t.rows.push_back({id, fmt_int(v.final_year), fmt6(v.project_cum_ha),
                          fmt6(v.synthetic_cum_ha), fmt6(v.terminal_gap_ha),
                          fmt6(v.terminal_gap_pct_area), yesno(v.passes)});
    return t;
}

CsvTable trajectory_table(const ScFit& fit, const OutcomeSeries* baseline) {
    CsvTable t;
    t.header = {"project", "year", "observed_cum_ha", "synthetic_cum_ha", "baseline_cum_ha"};
    const int first = fit.treated_cumulative.first_year;
    const int last = fit.treated_cumulative.last_year();
    for (int y = first; y <= last; ++y) {
        std::string base;
        if (baseline && baseline->covers(y)) base = fmt6(baseline->at_year(y));
        t.rows.push_back({fit.treated_id, fmt_int(y), fmt6(fit.treated_cumulative.at_year(y)),
                          fmt6(fit.synthetic_cumulative.at_year(y)), base});
    }
    return t;
}

CsvTable gap_table(const ScFit& fit, const PlaceboReport* placebo) {
    CsvTable t;
    t.header = {"project", "year", "gap_ha", "band_lower_ha", "band_upper_ha", "exceeds", "status"};
    std::string status;
    if (placebo)
        status = placebo->inconclusive    ? "inconclusive"
                 : placebo->significant   ? "significant"
                                          : "not_significant";
    const int first = fit.gap.first_year;
    const int last = fit.gap.last_year();
    for (int y = first; y <= last; ++y) {
        std::string lo, hi, exceeds;
        if (placebo && !placebo->inconclusive && y >= placebo->years.front()) {
            const std::size_t i = static_cast<std::size_t>(y - placebo->years.front());
            lo = fmt6(placebo->band_lo[i]);
            hi = fmt6(placebo->band_hi[i]);
            exceeds = yesno(placebo->exceeds[i]);
        }
        t.rows.push_back({fit.treated_id, fmt_int(y), fmt6(fit.gap.at_year(y)), lo, hi, exceeds,
                          status});
    }
    return t;
}

CsvTable match_balance_table(const std::vector<BalanceEntry>& entries) {
    CsvTable t;
    t.header = {"covariate", "smd_before", "smd_after"};
    for (const auto& e : entries)
        t.rows.push_back({e.covariate, fmt6(e.smd_before), fmt6(e.smd_after)});
    return t;
}

nlohmann::json matchsets_json(const ReportBundle& bundle) {
    json doc = json::object();
    auto set_json = [](const MatchSet& s) {
        json controls = json::array();
        for (const auto& c : s.controls) controls.push_back({{"id", c.id}, {"weight", jnum(c.weight)}});
        return json{{"treated", s.treated},
                    {"method", s.method},
                    {"treatment_year", s.treatment_year},
                    {"lead", s.lead},
                    {"controls", controls}};
    };
    if (bundle.matches) {
        json sets = json::array();
        for (const auto& s : bundle.matches->sets) sets.push_back(set_json(s));
        doc["panel"] = {{"sets", sets}, {"notes", bundle.matches->notes}};
    }
    json genetic = json::array();
    for (const auto& [id, res] : bundle.genetic) {
        json g = set_json(res.matches);
        g["fitness"] = jnum(res.fitness);
        g["covariates"] = res.covariates;
        json w = json::array();
        for (double v : res.metric_weights) w.push_back(jnum(v));
        g["metric_weights"] = w;
        genetic.push_back(std::move(g));
    }
    if (!genetic.empty()) doc["genetic"] = std::move(genetic);
    return doc;
}

nlohmann::json summary_json(const ReportBundle& bundle) {
    json doc = json::object();

    json missing = json::array();
    if (bundle.projects.empty()) missing.push_back("sc");
    if (!bundle.gsc) missing.push_back("gsc");
    if (!bundle.matches && bundle.panel_att.empty() && bundle.genetic.empty())
        missing.push_back("match");
    if (!bundle.credit) missing.push_back("credit");
    doc["missing_stages"] = std::move(missing);

    if (!bundle.projects.empty()) {
        json projects = json::array();
        for (const auto& p : bundle.projects) {
            json j;
            j["id"] = p.id;
            j["treatment_year"] = p.sc.fit.treatment_year;
            j["n_donors"] = p.sc.fit.donor_ids.size();
            j["screen_tolerance"] = jnum(p.sc.screen.tolerance);
            j["mspe_pre"] = jnum(p.sc.fit.mspe_pre);
            j["mspe_post"] = jnum(p.sc.fit.mspe_post);
            j["validation_ran"] = p.sc.validation_ran;
            j["validated"] = p.sc.validated;
            if (p.sc.validation_ran) {
                j["validation"] = {{"final_year", p.sc.validation.final_year},
                                   {"diff_ha", jnum(p.sc.validation.terminal_gap_ha)},
                                   {"diff_pct_area", jnum(p.sc.validation.terminal_gap_pct_area)},
                                   {"pass", p.sc.validation.passes}};
            }
            if (p.placebo) {
                j["placebo"] = {{"significant", p.placebo->significant},
                                {"inconclusive", p.placebo->inconclusive},
                                {"n_retained", p.placebo->n_retained},
                                {"n_placebos", p.placebo->fits.size()}};
            }
            if (!p.sc.fit.notes.empty()) j["notes"] = p.sc.fit.notes;
            projects.push_back(std::move(j));
        }
        doc["projects"] = std::move(projects);
    }

    if (bundle.gsc) {
        const auto& g = *bundle.gsc;
        json cv = json::array();
        for (double v : g.cv_mse) cv.push_back(jnum(v));
        doc["gsc"] = {{"selected_factors", g.selected_factors},
                      {"cv_mse", std::move(cv)},
                      {"mean_att", jnum(g.mean_att)},
                      {"mean_se", jnum(g.mean_se)},
                      {"mean_ci_lower", jnum(g.mean_ci_lo)},
                      {"mean_ci_upper", jnum(g.mean_ci_hi)},
                      {"mean_p", jnum(g.mean_p)},
                      {"pre_mean_att", jnum(g.pre_mean_att)},
                      {"pre_mean_se", jnum(g.pre_mean_se)},
                      {"n_treated", g.n_treated},
                      {"n_controls", g.n_controls}};
    }

    if (!bundle.panel_att.empty()) {
        json rows = json::array();
        for (const auto& r : bundle.panel_att)
            rows.push_back({{"lead", r.lead},
                            {"n_treated", r.n_treated},
                            {"att_ha", jnum(r.att_ha)},
                            {"se_ha", jnum(r.se_ha)},
                            {"att_pct", jnum(r.att_pct)},
                            {"se_pct", jnum(r.se_pct)}});
        doc["panel_att"] = std::move(rows);
    }

    if (!bundle.genetic.empty()) {
        json rows = json::array();
        for (const auto& [id, res] : bundle.genetic)
            rows.push_back({{"id", id},
                            {"fitness", jnum(res.fitness)},
                            {"n_controls", res.matches.controls.size()}});
        doc["genetic_match"] = std::move(rows);
    }

    if (bundle.credit) {
        const auto& c = *bundle.credit;
        json conflicts = json::array();
        for (const auto& r : c.rows)
            if (r.gate_conflict) conflicts.push_back(r.in.project);
        doc["credit"] = {{"n_projects", c.rows.size()},
                         {"total_exante", jnum(c.total_exante)},
                         {"total_proportional", jnum(c.total_proportional)},
                         {"total_sc_offsets", jnum(c.total_sc_offsets)},
                         {"total_sc_offsets_raw", jnum(c.total_sc_offsets_raw)},
                         {"nonsignificant_exante_share", jnum(c.nonsignificant_exante_share)},
                         {"gate_conflicts", std::move(conflicts)}};
    }
    return doc;
}

std::vector<std::string> write_report(const ReportBundle& bundle, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> written;
    auto emit_csv = [&](const std::string& name, const CsvTable& t) {
        write_text(fs::path(out_dir) / name, to_csv(t));
        written.push_back(name);
    };
    auto emit_json = [&](const std::string& name, const json& j) {
        write_text(fs::path(out_dir) / name, j.dump(2) + "\n");
        written.push_back(name);
    };

    std::vector<std::pair<UnitId, ValidationResult>> validations;
    for (const auto& p : bundle.projects) {
        const std::string tag = safe_name(p.id);
        emit_csv("trajectory_" + tag + ".csv",
                 trajectory_table(p.sc.fit,
                                  p.baseline_cumulative ? &*p.baseline_cumulative : nullptr));
        emit_csv("gaps_" + tag + ".csv",
                 gap_table(p.sc.fit, p.placebo ? &*p.placebo : nullptr));
        if (!p.balance.empty()) emit_csv("balance_" + tag + ".csv", balance_table_csv(p.balance));
        if (p.sc.validation_ran) validations.emplace_back(p.id, p.sc.validation);
    }
    for (const auto& [id, res] : bundle.genetic)
        emit_csv("match_balance_" + safe_name(id) + ".csv", match_balance_table(res.balance));
    if (!validations.empty()) emit_csv("validation.csv", validation_table(validations));
    if (bundle.gsc) emit_csv("att_gsc.csv", att_table(*bundle.gsc));
    if (!bundle.panel_att.empty()) emit_csv("att_by_lead.csv", panel_att_table(bundle.panel_att));
    if (bundle.matches || !bundle.genetic.empty()) emit_json("matchsets.json", matchsets_json(bundle));
    if (bundle.credit) emit_csv("ledger.csv", ledger_to_csv(*bundle.credit));
    emit_json("summary.json", summary_json(bundle));
    return written;
}

}  // namespace deforsc
