// deforsc: avoided-deforestation impact evaluation from the command line.
//
// Subcommands map onto pipeline stages (simulate, screen-donors, sc,
// validate, placebo, gsc, match, credit, report) plus `run` for the full
// configured pipeline. Most subcommands are thin wrappers that force the
// corresponding stage list; `simulate` and `credit` write their artifacts
// directly. Exit codes: 0 success, 2 input/config/domain problems, 1 runtime
// or numerical failure.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deforsc/credit/credit.hpp"
#include "deforsc/errors.hpp"
#include "deforsc/pipeline/config.hpp"
#include "deforsc/pipeline/run.hpp"
#include "deforsc/pipeline/simulate.hpp"
#include "deforsc/sc/screening.hpp"
#include "deforsc/util/numfmt.hpp"

namespace fs = std::filesystem;
using namespace deforsc;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_dir;
    bool seed_set = false;
    std::uint64_t seed = 0;
    std::string panel_path;
    std::string credits_path;
};

// Config precedence: built-in defaults < --config file < command-line flags.
RunConfig effective_config(const GlobalOpts& g) {
    RunConfig cfg;
    if (!g.config_path.empty()) cfg = load_run_config(g.config_path);
    if (g.seed_set) {
        cfg.seed = g.seed;
        cfg.simulate.landscape.seed = g.seed;
        cfg.sc.seed = g.seed;
        cfg.gsc.seed = g.seed;
        cfg.match.seed = g.seed;
        cfg.genetic.seed = g.seed;
    }
    if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
    if (!g.panel_path.empty()) cfg.panel_path = g.panel_path;
    if (!g.credits_path.empty()) cfg.credits_path = g.credits_path;
    if (cfg.stages.empty()) cfg.stages = pipeline_stage_order();
    return cfg;
}

int run_and_print(const RunConfig& cfg) {
    const RunManifest manifest = run_pipeline(cfg);
    for (const auto& s : manifest.stages) {
        if (!s.ran) continue;
        std::cout << s.name;
        if (!s.note.empty()) std::cout << " (" << s.note << ")";
        for (const auto& [file, digest] : s.outputs)
            std::cout << "\n  " << file << "  " << digest;
        std::cout << "\n";
    }
    std::cout << "outputs in " << cfg.out_dir << "\n";
    return 0;
}

int run_with_stages(const GlobalOpts& g, const std::vector<std::string>& stages) {
    RunConfig cfg = effective_config(g);
    if (!stages.empty()) cfg.stages = stages;
    return run_and_print(cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic-control impact evaluation for avoided deforestation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "deforsc 1.0.0");

    GlobalOpts g;
    app.add_option("--config", g.config_path, "Run configuration (TOML)")->expected(1);
    app.add_option("--out-dir", g.out_dir, "Output directory (overrides config)");
    app.add_option("--seed", g.seed, "Global seed (overrides config)")
        ->each([&](const std::string&) { g.seed_set = true; });
    app.add_option("--panel", g.panel_path, "Panel CSV input (overrides config)");
    app.add_option("--credits", g.credits_path, "Crediting inputs CSV (overrides config)");

    // --- simulate ---
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic landscape panel");
    int sim_rows = -1, sim_cols = -1, sim_years = -1, sim_sites = -1, sim_radius = -1,
        sim_ty = -1;
    double sim_intensity = -1.0;
    std::string sim_out;
    sim->add_option("--rows", sim_rows, "Grid rows");
    sim->add_option("--cols", sim_cols, "Grid columns");
    sim->add_option("--years", sim_years, "Panel length in years");
    sim->add_option("--intensity", sim_intensity, "Mean annual clearing probability");
    sim->add_option("--sites", sim_sites, "Number of donor sites");
    sim->add_option("--radius", sim_radius, "Site radius in cells");
    sim->add_option("--treatment-year", sim_ty, "Project treatment year");
    sim->add_option("--out", sim_out, "Panel CSV path (default <out-dir>/panel.csv)");

    // --- screen-donors ---
    auto* screen = app.add_subcommand("screen-donors", "Preview the pressure-screened donor pool");
    double screen_tol = -1.0;
    screen->add_option("--tolerance", screen_tol, "Band half-width (fraction of project pressure)");

    // --- single-stage wrappers ---
    auto* sc_cmd = app.add_subcommand("sc", "Fit synthetic controls for every project");
    auto* validate_cmd =
        app.add_subcommand("validate", "Split-sample validation of the synthetic controls");
    auto* placebo_cmd = app.add_subcommand("placebo", "In-space placebo inference");
    auto* gsc_cmd = app.add_subcommand("gsc", "Generalized synthetic control (IFE / matrix completion)");
    std::string gsc_estimator;
    int gsc_factors = -2, gsc_bootstrap = -1;
    gsc_cmd->add_option("--estimator", gsc_estimator, "\"mc\" or \"ife\"");
    gsc_cmd->add_option("--factors", gsc_factors, "Fixed hyper-parameter (-1 cross-validates)");
    gsc_cmd->add_option("--bootstrap", gsc_bootstrap, "Bootstrap replicates");
    auto* match_cmd = app.add_subcommand("match", "Matching robustness checks");
    std::string match_method;
    int match_k = -1, match_window = -1, match_leads = -1;
    match_cmd->add_option("--method", match_method, "mahalanobis | ps | psweight | genetic");
    match_cmd->add_option("--k", match_k, "Controls per treated unit");
    match_cmd->add_option("--window", match_window, "History window (years)");
    match_cmd->add_option("--leads", match_leads, "Evaluation leads");

    // --- credit ---
    auto* credit_cmd = app.add_subcommand("credit", "Carbon-offset crediting ledger");
    std::string credit_inputs, credit_out;
    credit_cmd->add_option("--inputs", credit_inputs, "credits.csv");
    credit_cmd->add_option("--out", credit_out, "ledger.csv path (default <out-dir>/ledger.csv)");

    auto* report_cmd = app.add_subcommand("report", "Run all configured stages and emit the bundle");
    auto* run_cmd = app.add_subcommand("run", "Run the configured pipeline");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // bad invocation = pre-flight failure
    }

    try {
        if (sim->parsed()) {
            RunConfig cfg = effective_config(g);
            auto& land = cfg.simulate.landscape;
            if (sim_rows > 0) land.rows = sim_rows;
            if (sim_cols > 0) land.cols = sim_cols;
            if (sim_years > 0) land.n_years = sim_years;
            if (sim_intensity >= 0) land.intensity = sim_intensity;
            if (sim_sites > 0) cfg.simulate.n_donors = sim_sites;
            if (sim_radius > 0) cfg.simulate.site_radius = sim_radius;
            if (sim_ty > 0) cfg.simulate.treatment_year = sim_ty;

            const fs::path out =
                sim_out.empty() ? fs::path(cfg.out_dir) / "panel.csv" : fs::path(sim_out);
            if (out.has_parent_path()) fs::create_directories(out.parent_path());
            SimulatedStudy study = simulate_study(cfg.simulate);
            save_panel(out.string(), study.panel, cfg.schema);
            const fs::path sites_path = out.parent_path() / "sites.json";
            std::ofstream sites(sites_path, std::ios::binary);
            if (!sites) throw SchemaError("cannot write '" + sites_path.string() + "'");
            sites << sites_manifest_json(study.sites);
            std::cout << "panel: " << out.string() << " (" << study.panel.units().size()
                      << " units, " << study.panel.first_year() << "-" << study.panel.last_year()
                      << ")\nsites: " << sites_path.string() << "\n";
            return 0;
        }

        if (screen->parsed()) {
            RunConfig cfg = effective_config(g);
            if (cfg.panel_path.empty())
                throw SchemaError("screen-donors needs --panel (or inputs.panel in the config)");
            if (screen_tol > 0) cfg.sc.pressure_tolerance_init = screen_tol;
            cfg.stages = {"screen"};
            return run_and_print(cfg);
        }

        if (sc_cmd->parsed()) return run_with_stages(g, {"sc", "report"});
        if (validate_cmd->parsed()) return run_with_stages(g, {"validate", "report"});
        if (placebo_cmd->parsed()) return run_with_stages(g, {"sc", "placebo", "report"});
        if (gsc_cmd->parsed()) {
            RunConfig cfg = effective_config(g);
            if (!gsc_estimator.empty())
                cfg.gsc.estimator = gsc_estimator == "ife" ? GscEstimator::Ife
                                                           : GscEstimator::MatrixCompletion;
            if (gsc_factors >= -1) cfg.gsc.factors = gsc_factors;
            if (gsc_bootstrap > 0) cfg.gsc.bootstrap_runs = gsc_bootstrap;
            cfg.stages = {"gsc", "report"};
            return run_and_print(cfg);
        }
        if (match_cmd->parsed()) {
            RunConfig cfg = effective_config(g);
            if (!match_method.empty()) {
                if (match_method == "genetic") {
                    cfg.genetic_enabled = true;
                } else {
                    cfg.match.method = match_method == "ps"         ? PanelMatchMethod::PsMatch
                                       : match_method == "psweight" ? PanelMatchMethod::PsWeight
                                                                    : PanelMatchMethod::Mahalanobis;
                }
            }
            if (match_k > 0) {
                cfg.match.max_controls = match_k;
                cfg.genetic.n_controls = match_k;
            }
            if (match_window > 0) cfg.match.history_window = match_window;
            if (match_leads > 0) cfg.match.max_lead = match_leads;
            cfg.stages = {"match", "report"};
            return run_and_print(cfg);
        }

        if (credit_cmd->parsed()) {
            RunConfig cfg = effective_config(g);
            const std::string inputs = !credit_inputs.empty() ? credit_inputs : cfg.credits_path;
            if (inputs.empty()) throw SchemaError("credit needs --inputs credits.csv");
            const CreditLedger ledger = aggregate_ledger(load_credit_inputs(inputs));
            const fs::path out =
                credit_out.empty() ? fs::path(cfg.out_dir) / "ledger.csv" : fs::path(credit_out);
            if (out.has_parent_path()) fs::create_directories(out.parent_path());
            write_csv(out.string(), ledger_to_csv(ledger));
            std::cout << "ledger: " << out.string() << "\n"
                      << "total ex-ante offsets:      " << fmt6(ledger.total_exante) << "\n"
                      << "total proportional offsets: " << fmt6(ledger.total_proportional) << "\n"
                      << "total SC offsets (gated):   " << fmt6(ledger.total_sc_offsets) << "\n";
            return 0;
        }

        if (report_cmd->parsed()) return run_with_stages(g, pipeline_stage_order());
        if (run_cmd->parsed()) return run_with_stages(g, {});
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IntegrityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
