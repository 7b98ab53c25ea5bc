#include "deforsc/pipeline/run.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "deforsc/credit/credit.hpp"
#include "deforsc/errors.hpp"
#include "deforsc/gsc/att.hpp"
#include "deforsc/match/genetic.hpp"
#include "deforsc/match/panel_att.hpp"
#include "deforsc/match/panel_match.hpp"
#include "deforsc/pipeline/simulate.hpp"
#include "deforsc/report/emit.hpp"
#include "deforsc/sc/balance.hpp"
#include "deforsc/sc/placebo.hpp"
#include "deforsc/sc/screening.hpp"
#include "deforsc/util/digest.hpp"
#include "deforsc/util/numfmt.hpp"

namespace deforsc {

namespace fs = std::filesystem;

namespace {

bool wants(const RunConfig& cfg, const std::string& stage) {
    return std::find(cfg.stages.begin(), cfg.stages.end(), stage) != cfg.stages.end();
}

bool needs_panel(const RunConfig& cfg) {
    for (const char* s : {"screen", "validate", "sc", "placebo", "gsc", "match"})
        if (wants(cfg, s)) return true;
    return false;
}

// Re-throw the in-flight exception with the failing stage attached, keeping
// its type so the CLI's exit-code mapping still applies.
[[noreturn]] void rethrow_with_stage(const std::string& stage) {
    const std::string prefix = "stage '" + stage + "': ";
    try {
        throw;
    } catch (const ScreeningExhaustedError& e) {
        throw ScreeningExhaustedError(prefix + e.what());
    } catch (const SchemaError& e) {
        throw SchemaError(prefix + e.what());
    } catch (const IntegrityError& e) {
        throw IntegrityError(prefix + e.what());
    } catch (const DomainError& e) {
        throw DomainError(prefix + e.what());
    } catch (const NumericError& e) {
        throw NumericError(prefix + e.what());
    } catch (const std::exception& e) {
        throw Error(prefix + e.what());
    }
}

// Ex-ante baseline as a cumulative series for the Fig-2-style trajectory
// file: a straight line from the treatment year to the crediting horizon,
// flat afterwards.
OutcomeSeries baseline_ramp(const CreditInputs& in, int ty, int first, int last) {
    const int horizon = std::max(in.horizon_year, ty);
    OutcomeSeries s;
    s.first_year = first;
    for (int y = first; y <= last; ++y) {
        double v = 0.0;
        if (y >= ty)
            v = y >= horizon ? in.baseline_defor
                             : in.baseline_defor * static_cast<double>(y - ty + 1) /
                                   static_cast<double>(horizon - ty + 1);
        s.values.push_back(v);
    }
    return s;
}

struct PipelineState {
    std::optional<StudyPanel> panel;
    std::vector<ProjectReport> projects;  // one per project unit, id order
    bool fits_done = false;
    std::optional<PanelMatchResult> matches;
    std::vector<PanelAttRow> panel_att_rows;
    std::vector<std::pair<UnitId, GeneticMatchResult>> genetic;
    std::optional<GscResult> gsc;
    std::optional<CreditLedger> credit;
    std::vector<CreditInputs> credit_inputs;
};

std::vector<const Unit*> donor_pool(const StudyPanel& panel) {
    return panel.by_role(Role::DonorCandidate);
}

// Runs screening + validation + the final nested fit for every project and
// caches the results (used by both the validate and sc stages).
void ensure_fits(PipelineState& st, const RunConfig& cfg) {
    if (st.fits_done) return;
    const auto pool = donor_pool(*st.panel);
    for (const Unit* p : st.panel->by_role(Role::Project)) {
        ProjectReport rep;
        rep.id = p->id;
        rep.sc = fit_project(*p, pool, cfg.sc);
        std::vector<const Unit*> donors;
        for (const auto& id : rep.sc.screen.donor_ids) donors.push_back(&st.panel->unit(id));
        rep.balance = balance_table(rep.sc.fit, *p, donors);
        st.projects.push_back(std::move(rep));
    }
    st.fits_done = true;
}

}  // namespace

void preflight(const RunConfig& cfg) {
    if (cfg.stages.empty()) throw SchemaError("config: empty stage list");
    if (needs_panel(cfg) && cfg.panel_path.empty() && !wants(cfg, "simulate"))
        throw SchemaError(
            "config: requested stages need a panel; provide inputs.panel or add the "
            "simulate stage");
    if (!cfg.panel_path.empty() && !fs::exists(cfg.panel_path))
        throw SchemaError("config: panel file '" + cfg.panel_path + "' does not exist");
    if (wants(cfg, "placebo") && !wants(cfg, "sc"))
        throw SchemaError("config: the placebo stage requires the sc stage");
    if (wants(cfg, "credit")) {
        if (cfg.credits_path.empty())
            throw SchemaError("config: the credit stage needs inputs.credits");
        if (!fs::exists(cfg.credits_path))
            throw SchemaError("config: credits file '" + cfg.credits_path + "' does not exist");
    }
}

RunManifest run_pipeline(const RunConfig& cfg) {
    preflight(cfg);

    RunManifest manifest;
    manifest.config_path = cfg.config_path;
    manifest.config_digest = cfg.config_digest;
    manifest.seed = cfg.seed;

    fs::create_directories(cfg.out_dir);
    PipelineState st;
    std::vector<fs::path> written;  // for cleanup on failure

    auto record_output = [&](StageRecord& rec, const std::string& name) {
        const fs::path path = fs::path(cfg.out_dir) / name;
        written.push_back(path);
        rec.outputs.emplace_back(name, file_digest_hex(path.string()));
    };

    auto run_stage = [&](const std::string& name, auto&& body) {
        StageRecord rec;
        rec.name = name;
        if (!wants(cfg, name)) {
            rec.note = "not requested";
            manifest.stages.push_back(std::move(rec));
            return;
        }
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body(rec);
        } catch (...) {
            std::error_code ec;
            for (const auto& p : written) fs::remove(p, ec);
            rethrow_with_stage(name);
        }
        rec.ran = true;
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                          .count();
        manifest.stages.push_back(std::move(rec));
    };

    // --- simulate ---
    run_stage("simulate", [&](StageRecord& rec) {
        if (!cfg.panel_path.empty()) {
            rec.note = "skipped: inputs.panel provided";
            return;
        }
        SimulatedStudy study = simulate_study(cfg.simulate);
        st.panel.emplace(std::move(study.panel));

        save_panel((fs::path(cfg.out_dir) / "panel.csv").string(), *st.panel, cfg.schema);
        record_output(rec, "panel.csv");

        std::ofstream out(fs::path(cfg.out_dir) / "sites.json", std::ios::binary);
        if (!out) throw SchemaError("cannot write sites.json under '" + cfg.out_dir + "'");
        out << sites_manifest_json(study.sites);
        out.close();
        record_output(rec, "sites.json");
    });

    // Load the panel lazily for whichever stage needs it first.
    auto ensure_panel = [&]() -> StudyPanel& {
        if (!st.panel) st.panel.emplace(load_panel(cfg.panel_path, cfg.schema));
        return *st.panel;
    };

    // --- screen (donor-pool preview at the initial tolerance) ---
    run_stage("screen", [&](StageRecord& rec) {
        StudyPanel& panel = ensure_panel();
        const auto pool = donor_pool(panel);
        CsvTable t;
        t.header = {"project", "tolerance", "donor", "pressure"};
        for (const Unit* p : panel.by_role(Role::Project)) {
            const ScreenResult res =
                screen_donors(*p, pool, cfg.sc, cfg.sc.pressure_tolerance_init);
            for (const auto& id : res.donor_ids)
                t.rows.push_back({p->id, fmt6(res.tolerance), id,
                                  fmt6(res.pool_pressures.at(id))});
            if (res.donor_ids.empty())
                t.rows.push_back({p->id, fmt6(res.tolerance), "", ""});
        }
        write_csv((fs::path(cfg.out_dir) / "screening.csv").string(), t);
        record_output(rec, "screening.csv");
    });

    // --- validate (split-sample check; runs the full adaptive fit) ---
    run_stage("validate", [&](StageRecord& rec) {
        ensure_panel();
        ensure_fits(st, cfg);
        int passed = 0, ran = 0;
        for (const auto& p : st.projects) {
            if (p.sc.validation_ran) ++ran;
            if (p.sc.validated) ++passed;
        }
        rec.note = std::to_string(passed) + "/" + std::to_string(ran) + " projects validated";
    });

    // --- sc (final weights) ---
    run_stage("sc", [&](StageRecord& rec) {
        ensure_panel();
        ensure_fits(st, cfg);
        CsvTable t;
        t.header = {"project", "kind", "name", "weight"};
        for (const auto& p : st.projects) {
            for (const auto& [id, w] : p.sc.fit.weights.donor_weights)
                t.rows.push_back({p.id, "donor", id, fmt6(w)});
            for (const auto& [name, v] : p.sc.fit.weights.covariate_weights)
                t.rows.push_back({p.id, "covariate", name, fmt6(v)});
        }
        write_csv((fs::path(cfg.out_dir) / "sc_weights.csv").string(), t);
        record_output(rec, "sc_weights.csv");
    });

    // --- placebo ---
    run_stage("placebo", [&](StageRecord& rec) {
        StudyPanel& panel = ensure_panel();
        CsvTable t;
        t.header = {"project", "placebo", "mspe_pre", "discarded"};
        for (auto& p : st.projects) {
            std::vector<const Unit*> donors;
            for (const auto& id : p.sc.screen.donor_ids) donors.push_back(&panel.unit(id));
            p.placebo = run_placebos(p.sc.fit, panel.unit(p.id), donors, cfg.sc);
            for (const auto& f : p.placebo->fits)
                t.rows.push_back({p.id, f.id, fmt6(f.mspe_pre), f.discarded ? "yes" : "no"});
        }
        write_csv((fs::path(cfg.out_dir) / "placebos.csv").string(), t);
        record_output(rec, "placebos.csv");
    });

    // --- gsc ---
    run_stage("gsc", [&](StageRecord& rec) {
        StudyPanel& panel = ensure_panel();
        st.gsc = estimate_att(panel, cfg.gsc);
        rec.note = "selected " + std::to_string(st.gsc->selected_factors) +
                   (cfg.gsc.estimator == GscEstimator::Ife ? " factors" : " threshold index");
    });

    // --- match ---
    run_stage("match", [&](StageRecord& rec) {
        StudyPanel& panel = ensure_panel();
        st.matches = panel_match(panel, cfg.match);
        st.panel_att_rows = panel_att(panel, *st.matches, cfg.match);
        if (cfg.genetic_enabled) {
            const auto pool = donor_pool(panel);
            if (static_cast<int>(pool.size()) < cfg.genetic.n_controls) {
                rec.note = "genetic matching skipped: pool smaller than k";
            } else {
                for (const Unit* p : panel.by_role(Role::Project))
                    st.genetic.emplace_back(p->id, genetic_match(*p, pool, cfg.genetic));
            }
        }
    });

    // --- credit ---
    run_stage("credit", [&](StageRecord& rec) {
        st.credit_inputs = load_credit_inputs(cfg.credits_path);
        st.credit = aggregate_ledger(st.credit_inputs);
        int conflicts = 0;
        for (const auto& r : st.credit->rows) conflicts += r.gate_conflict ? 1 : 0;
        if (conflicts > 0) rec.note = std::to_string(conflicts) + " gate conflict(s) flagged";
    });

    // --- report ---
    run_stage("report", [&](StageRecord& rec) {
        // Attach ex-ante baselines to projects that have crediting inputs.
        if (st.panel) {
            for (auto& p : st.projects) {
                for (const auto& in : st.credit_inputs) {
                    if (in.project != p.id) continue;
                    const Unit& u = st.panel->unit(p.id);
                    if (!u.treatment_year) break;
                    p.baseline_cumulative =
                        baseline_ramp(in, *u.treatment_year, u.outcome.first_year,
                                      u.outcome.last_year());
                    break;
                }
            }
        }
        ReportBundle bundle;
        bundle.projects = st.projects;
        bundle.gsc = st.gsc;
        bundle.matches = st.matches;
        bundle.panel_att = st.panel_att_rows;
        bundle.genetic = st.genetic;
        bundle.credit = st.credit;
        for (const auto& name : write_report(bundle, cfg.out_dir)) record_output(rec, name);
    });

    // --- manifest ---
    nlohmann::json doc;
    doc["config_path"] = manifest.config_path;
    doc["config_digest"] = manifest.config_digest;
    doc["seed"] = manifest.seed;
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : manifest.stages) {
        nlohmann::json j;
        j["name"] = s.name;
        j["ran"] = s.ran;
        if (!s.note.empty()) j["note"] = s.note;
        j["wall_ms"] = s.wall_ms;
        nlohmann::json outs = nlohmann::json::object();
        for (const auto& [file, digest] : s.outputs) outs[file] = digest;
        j["outputs"] = std::move(outs);
        stages.push_back(std::move(j));
    }
    doc["stages"] = std::move(stages);
    std::ofstream out(fs::path(cfg.out_dir) / "manifest.json", std::ios::binary);
    if (!out) throw SchemaError("cannot write manifest.json under '" + cfg.out_dir + "'");
    out << doc.dump(2) << "\n";

    return manifest;
}

}  // namespace deforsc
