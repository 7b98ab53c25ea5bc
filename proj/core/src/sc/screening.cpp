#include "deforsc/sc/screening.hpp"

#include <cmath>

#include "deforsc/errors.hpp"
#include "deforsc/sc/nested.hpp"
#include "deforsc/sc/validate.hpp"

namespace deforsc {

double pressure_of(const Unit& u, const ScConfig& cfg, int pre_end) {
    auto it = u.covariates.dynamics.find(cfg.pressure_covariate);
    if (it == u.covariates.dynamics.end())
        throw DomainError("unit '" + u.id + "': missing pressure covariate '" +
                          cfg.pressure_covariate + "'");
    const int first = it->second.first_year;
    const int n = pre_end - first;
    if (n <= 0) throw DomainError("unit '" + u.id + "': no pre-treatment years for screening");
    double total = 0.0;
    for (int y = first; y < pre_end; ++y) total += it->second.at_year(y);
    return total / n;
}

ScreenResult screen_donors(const Unit& project, const std::vector<const Unit*>& pool,
                           const ScConfig& cfg, double tolerance) {
    const int pre_end = project.pre_period_end(project.outcome.last_year());
    ScreenResult res;
    res.tolerance = tolerance;
    res.project_pressure = pressure_of(project, cfg, pre_end);
    const double band = tolerance * std::fabs(res.project_pressure);
    for (const Unit* d : pool) {
        if (d->id == project.id) continue;
        const double p = pressure_of(*d, cfg, pre_end);
        res.pool_pressures[d->id] = p;
        if (std::fabs(p - res.project_pressure) <= band) res.donor_ids.push_back(d->id);
    }
    return res;  // pool_pressures is a map, donor_ids follow pool order
}

ScProjectResult fit_project(const Unit& project, const std::vector<const Unit*>& pool,
                            const ScConfig& cfg) {
    const int first = project.outcome.first_year;
    const int pre_end = project.pre_period_end(project.outcome.last_year());
    const bool can_validate = pre_end - first >= cfg.min_validation_pre_years;

    auto donors_by_id = [&](const std::vector<UnitId>& ids) {
        std::vector<const Unit*> out;
        for (const Unit* d : pool)
            for (const auto& id : ids)
                if (d->id == id) {
                    out.push_back(d);
                    break;
                }
        return out;
    };

    // Widening schedule: init, init+step, ...; the cap itself is always the
    // final band so float accumulation can never skip it.
    std::vector<double> bands;
    const double eps = 1e-12;
    if (cfg.pressure_tolerance_step <= 0.0)
        throw DomainError("pressure tolerance step must be positive");
    for (double tol = cfg.pressure_tolerance_init; tol < cfg.pressure_tolerance_max - eps;
         tol += cfg.pressure_tolerance_step)
        bands.push_back(tol);
    bands.push_back(cfg.pressure_tolerance_max);

    ScProjectResult result;
    for (std::size_t bi = 0; bi < bands.size(); ++bi) {
        const bool last_band = bi + 1 == bands.size();
        ScreenResult screen = screen_donors(project, pool, cfg, bands[bi]);
        if (screen.donor_ids.empty()) {
            if (last_band)
                throw ScreeningExhaustedError(
                    "project '" + project.id +
                    "': no donors within the pressure band even at tolerance " +
                    std::to_string(cfg.pressure_tolerance_max));
            continue;
        }
        auto donors = donors_by_id(screen.donor_ids);

        result.screen = screen;
        if (!can_validate) {
            result.fit = solve_nested(project, donors, cfg);
            result.validation_ran = false;
            result.validated = false;
            return result;
        }
        result.validation = validate_split(project, donors, cfg);
        result.validation_ran = true;
        if (result.validation.passes || last_band) {
            result.fit = solve_nested(project, donors, cfg);
            result.validated = result.validation.passes;
            return result;
        }
    }
    // Unreachable: the final band either returned or threw.
    throw ScreeningExhaustedError("project '" + project.id + "': screening failed");
}

}  // namespace deforsc
