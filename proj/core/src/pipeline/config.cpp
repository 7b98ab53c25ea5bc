#include "deforsc/pipeline/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "deforsc/errors.hpp"
#include "deforsc/util/digest.hpp"

namespace deforsc {

const std::vector<std::string>& pipeline_stage_order() {
    static const std::vector<std::string> order = {"simulate", "screen", "validate",
                                                   "sc",       "placebo", "gsc",
                                                   "match",    "credit",  "report"};
    return order;
}

namespace {

std::vector<std::string> normalize_stages(std::vector<std::string> stages) {
    const auto& order = pipeline_stage_order();
    if (stages.empty()) return order;
    for (const auto& s : stages)
        if (std::find(order.begin(), order.end(), s) == order.end())
            throw SchemaError("config: unknown stage '" + s + "'");
    // Deduplicate and put in canonical order.
    std::vector<std::string> out;
    for (const auto& s : order)
        if (std::find(stages.begin(), stages.end(), s) != stages.end()) out.push_back(s);
    return out;
}

GscEstimator parse_estimator(const std::string& s) {
    if (s == "mc" || s == "matrix_completion") return GscEstimator::MatrixCompletion;
    if (s == "ife") return GscEstimator::Ife;
    throw SchemaError("config: unknown gsc estimator '" + s + "' (use \"mc\" or \"ife\")");
}

OutcomeScale parse_scale(const std::string& s) {
    if (s == "pct" || s == "percent") return OutcomeScale::PercentPerYear;
    if (s == "ha") return OutcomeScale::HaPerYear;
    throw SchemaError("config: unknown gsc scale '" + s + "' (use \"pct\" or \"ha\")");
}

PanelMatchMethod parse_match_method(const std::string& s) {
    if (s == "mahalanobis" || s == "maha") return PanelMatchMethod::Mahalanobis;
    if (s == "ps" || s == "ps_match") return PanelMatchMethod::PsMatch;
    if (s == "psweight" || s == "ps_weight") return PanelMatchMethod::PsWeight;
    throw SchemaError("config: unknown match method '" + s +
                      "' (use \"mahalanobis\", \"ps\", or \"psweight\")");
}

}  // namespace

RunConfig run_config_from_toml(const TomlDoc& doc) {
    RunConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(doc.get_int("", "seed", 42));
    cfg.out_dir = doc.get_string("", "out_dir", "out");
    cfg.stages = normalize_stages(doc.get_string_array("", "stages", {}));

    cfg.panel_path = doc.get_string("inputs", "panel", "");
    cfg.credits_path = doc.get_string("inputs", "credits", "");

    // --- simulate ---
    auto& land = cfg.simulate.landscape;
    land.rows = static_cast<int>(doc.get_int("simulate", "rows", land.rows));
    land.cols = static_cast<int>(doc.get_int("simulate", "cols", land.cols));
    land.cell_size_ha = doc.get_float("simulate", "cell_size_ha", land.cell_size_ha);
    land.first_year = static_cast<int>(doc.get_int("simulate", "first_year", land.first_year));
    land.n_years = static_cast<int>(doc.get_int("simulate", "years", land.n_years));
    land.intensity = doc.get_float("simulate", "intensity", land.intensity);
    land.heterogeneity = doc.get_float("simulate", "heterogeneity", land.heterogeneity);
    land.smooth_radius = static_cast<int>(doc.get_int("simulate", "smooth_radius", land.smooth_radius));
    land.smooth_passes = static_cast<int>(doc.get_int("simulate", "smooth_passes", land.smooth_passes));
    land.forest_base = doc.get_float("simulate", "forest_base", land.forest_base);
    land.forest_scale = doc.get_float("simulate", "forest_scale", land.forest_scale);
    land.forest_threshold = doc.get_float("simulate", "forest_threshold", land.forest_threshold);
    land.seed = static_cast<std::uint64_t>(doc.get_int("simulate", "seed", static_cast<long long>(cfg.seed)));
    cfg.simulate.n_donors = static_cast<int>(doc.get_int("simulate", "n_donors", cfg.simulate.n_donors));
    cfg.simulate.site_radius = static_cast<int>(doc.get_int("simulate", "radius", cfg.simulate.site_radius));
    cfg.simulate.treatment_year =
        static_cast<int>(doc.get_int("simulate", "treatment_year", cfg.simulate.treatment_year));
    if (const TomlValue* v = doc.find("simulate", "buffer_radii")) {
        for (double r : v->as_float_array("simulate.buffer_radii"))
            cfg.simulate.buffer_radii.push_back(static_cast<int>(r));
    }
    if (cfg.simulate.n_donors < 1) throw DomainError("config: simulate.n_donors must be >= 1");
    if (cfg.simulate.site_radius < 1) throw DomainError("config: simulate.radius must be >= 1");

    // --- panel schema ---
    cfg.schema.unit_col = doc.get_string("panel", "unit_col", cfg.schema.unit_col);
    cfg.schema.year_col = doc.get_string("panel", "year_col", cfg.schema.year_col);
    cfg.schema.outcome_col = doc.get_string("panel", "outcome_col", cfg.schema.outcome_col);
    cfg.schema.area_col = doc.get_string("panel", "area_col", cfg.schema.area_col);
    cfg.schema.treatment_col = doc.get_string("panel", "treatment_col", cfg.schema.treatment_col);
    cfg.schema.dynamic_covariates =
        doc.get_string_array("panel", "dynamic_covariates", cfg.schema.dynamic_covariates);

    // --- sc ---
    auto& sc = cfg.sc;
    sc.covariates = doc.get_string_array("sc", "covariates", sc.covariates);
    sc.pressure_covariate = doc.get_string("sc", "pressure_covariate", sc.pressure_covariate);
    sc.pressure_tolerance_init =
        doc.get_float("sc", "pressure_tolerance_init", sc.pressure_tolerance_init);
    sc.pressure_tolerance_step =
        doc.get_float("sc", "pressure_tolerance_step", sc.pressure_tolerance_step);
    sc.pressure_tolerance_max =
        doc.get_float("sc", "pressure_tolerance_max", sc.pressure_tolerance_max);
    sc.validation_threshold = doc.get_float("sc", "validation_threshold", sc.validation_threshold);
    sc.min_validation_pre_years =
        static_cast<int>(doc.get_int("sc", "min_validation_pre_years", sc.min_validation_pre_years));
    sc.mspe_discard_ratio = doc.get_float("sc", "mspe_discard_ratio", sc.mspe_discard_ratio);
    sc.outer_starts = static_cast<int>(doc.get_int("sc", "outer_starts", sc.outer_starts));
    sc.outer_evaluations =
        static_cast<int>(doc.get_int("sc", "outer_evaluations", sc.outer_evaluations));
    sc.outer_tol = doc.get_float("sc", "outer_tol", sc.outer_tol);
    sc.qp_tol = doc.get_float("sc", "qp_tol", sc.qp_tol);
    sc.qp_max_iterations =
        static_cast<int>(doc.get_int("sc", "qp_max_iterations", sc.qp_max_iterations));
    sc.seed = static_cast<std::uint64_t>(doc.get_int("sc", "seed", static_cast<long long>(cfg.seed)));
    if (!(sc.pressure_tolerance_init > 0) || !(sc.pressure_tolerance_step > 0) ||
        !(sc.pressure_tolerance_max > 0))
        throw DomainError("config: sc pressure tolerances must be > 0");
    if (!(sc.validation_threshold > 0 && sc.validation_threshold < 1))
        throw DomainError("config: sc.validation_threshold must be in (0,1)");
    if (!(sc.mspe_discard_ratio > 1)) throw DomainError("config: sc.mspe_discard_ratio must be > 1");

    // --- gsc ---
    auto& gsc = cfg.gsc;
    gsc.estimator = parse_estimator(doc.get_string("gsc", "estimator", "mc"));
    gsc.scale = parse_scale(doc.get_string("gsc", "scale", "pct"));
    gsc.factors = static_cast<int>(doc.get_int("gsc", "factors", gsc.factors));
    gsc.factor_min = static_cast<int>(doc.get_int("gsc", "factor_min", gsc.factor_min));
    gsc.factor_max = static_cast<int>(doc.get_int("gsc", "factor_max", gsc.factor_max));
    gsc.cv_folds = static_cast<int>(doc.get_int("gsc", "cv_folds", gsc.cv_folds));
    gsc.bootstrap_runs = static_cast<int>(doc.get_int("gsc", "bootstrap_runs", gsc.bootstrap_runs));
    gsc.covariates = doc.get_string_array("gsc", "covariates", gsc.covariates);
    gsc.als_max_iterations =
        static_cast<int>(doc.get_int("gsc", "als_max_iterations", gsc.als_max_iterations));
    gsc.als_tol = doc.get_float("gsc", "als_tol", gsc.als_tol);
    gsc.seed = static_cast<std::uint64_t>(doc.get_int("gsc", "seed", static_cast<long long>(cfg.seed)));
    if (gsc.bootstrap_runs < 1) throw DomainError("config: gsc.bootstrap_runs must be >= 1");
    if (gsc.factor_min < 0 || gsc.factor_max < gsc.factor_min)
        throw DomainError("config: gsc factor range invalid");

    // --- match ---
    auto& match = cfg.match;
    match.method = parse_match_method(doc.get_string("match", "method", "mahalanobis"));
    match.max_controls = static_cast<int>(doc.get_int("match", "k", match.max_controls));
    match.history_window = static_cast<int>(doc.get_int("match", "window", match.history_window));
    match.max_lead = static_cast<int>(doc.get_int("match", "leads", match.max_lead));
    match.covariates = doc.get_string_array("match", "covariates", match.covariates);
    match.ridge = doc.get_float("match", "ridge", match.ridge);
    match.bootstrap_runs =
        static_cast<int>(doc.get_int("match", "bootstrap_runs", match.bootstrap_runs));
    match.seed = static_cast<std::uint64_t>(doc.get_int("match", "seed", static_cast<long long>(cfg.seed)));
    if (match.history_window < 1) throw DomainError("config: match.window must be >= 1");
    if (match.max_lead < 1) throw DomainError("config: match.leads must be >= 1");

    // --- genetic ---
    auto& gen = cfg.genetic;
    cfg.genetic_enabled = doc.get_bool("genetic", "enabled", true);
    gen.n_controls = static_cast<int>(doc.get_int("genetic", "k", gen.n_controls));
    gen.covariates = doc.get_string_array("genetic", "covariates", gen.covariates);
    gen.population = static_cast<int>(doc.get_int("genetic", "population", gen.population));
    gen.generations = static_cast<int>(doc.get_int("genetic", "generations", gen.generations));
    gen.tournament = static_cast<int>(doc.get_int("genetic", "tournament", gen.tournament));
    gen.mutation_sd = doc.get_float("genetic", "mutation_sd", gen.mutation_sd);
    gen.elites = static_cast<int>(doc.get_int("genetic", "elites", gen.elites));
    gen.seed = static_cast<std::uint64_t>(doc.get_int("genetic", "seed", static_cast<long long>(cfg.seed)));

    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    RunConfig cfg = run_config_from_toml(parse_toml(text));
    cfg.config_path = path;
    cfg.config_digest = digest_hex(fnv1a64(text));
    return cfg;
}

std::string example_config_text() {
    return R"(# Full-pipeline run configuration. Every key shows its default; delete any
# line to keep the built-in value. The global seed feeds every stage unless a
# section sets its own.
seed = 42
out_dir = "out"
# stages = ["simulate", "screen", "validate", "sc", "placebo", "gsc", "match", "credit", "report"]

[inputs]
# panel = "panel.csv"      # skip the simulate stage and load this panel
# credits = "credits.csv"  # enables the credit stage

[simulate]
rows = 200
cols = 200
cell_size_ha = 9.0
first_year = 2001
years = 20
intensity = 0.01
heterogeneity = 1.0
smooth_radius = 3
smooth_passes = 2
n_donors = 40
radius = 10
treatment_year = 2011
# buffer_radii = [20]

[sc]
# covariates = []
pressure_covariate = "buffer_defor_1"
pressure_tolerance_init = 0.1
pressure_tolerance_step = 0.1
pressure_tolerance_max = 1.0
validation_threshold = 0.005
mspe_discard_ratio = 5.0
outer_starts = 4
outer_evaluations = 300

[gsc]
estimator = "mc"      # "mc" or "ife"
scale = "pct"         # "pct" or "ha"
factors = -1          # -1 = cross-validate factor_min..factor_max
factor_min = 0
factor_max = 5
cv_folds = 5
bootstrap_runs = 1000

[match]
method = "mahalanobis"  # "mahalanobis", "ps", or "psweight"
k = 10
window = 5
leads = 5
bootstrap_runs = 500

[genetic]
enabled = true
k = 10
population = 50
generations = 100
)";
}

}  // namespace deforsc
