#include "deforsc/sc/validate.hpp"

#include <cmath>

#include "deforsc/errors.hpp"
#include "deforsc/sc/nested.hpp"

namespace deforsc {

bool validation_passes(double gap_ha, double area_ha, double threshold) {
    return std::fabs(gap_ha) / area_ha < threshold;
}

ValidationResult validate_split(const Unit& project, const std::vector<const Unit*>& donors,
                                const ScConfig& cfg) {
    const int first = project.outcome.first_year;
    const int panel_last = project.outcome.last_year();
    const int pre_end = project.pre_period_end(panel_last);
    const int n_pre = pre_end - first;
    if (n_pre < cfg.min_validation_pre_years)
        throw DomainError("project '" + project.id + "': " + std::to_string(n_pre) +
                          " pre-treatment years, need " +
                          std::to_string(cfg.min_validation_pre_years) + " to validate");

    // Training window = first ceil(n_pre / 2) years; the synthetic control is
    // fitted as if treatment began right after it.
    const int n_train = (n_pre + 1) / 2;
    Unit train_project = project;
    train_project.treatment_year = first + n_train;
    const ScFit fit = solve_nested(train_project, donors, cfg);

    ValidationResult res;
    res.n_train_years = n_train;
    res.n_test_years = n_pre - n_train;
    res.final_year = pre_end - 1;
    res.project_cum_ha = fit.treated_cumulative.at_year(res.final_year);
    res.synthetic_cum_ha = fit.synthetic_cumulative.at_year(res.final_year);
    res.terminal_gap_ha = fit.gap.at_year(pre_end - 1);
    res.terminal_gap_pct_area = 100.0 * res.terminal_gap_ha / project.area_ha;
    res.passes = validation_passes(res.terminal_gap_ha, project.area_ha, cfg.validation_threshold);
    return res;
}

}  // namespace deforsc
