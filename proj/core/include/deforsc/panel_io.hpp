// Long-format panel CSV loading/saving.
//
// File layout: one row per unit-year with columns
//   unit,year,deforestation_ha,area_ha,treatment_year,<covariate columns...>
// Static covariates are repeated on every row of their unit; treatment_year is
// empty for never-treated units. A covariate column is classified as static
// when it is constant within every unit (override with schema.dynamic_covariates
// for dynamic series that happen to be constant).
#pragma once

#include <string>
#include <vector>

#include "deforsc/panel.hpp"

namespace deforsc {

struct PanelSchema {
    std::string unit_col = "unit";
    std::string year_col = "year";
    std::string outcome_col = "deforestation_ha";
    std::string area_col = "area_ha";
    std::string treatment_col = "treatment_year";
    // Names forced to dynamic regardless of the constant-within-unit check.
    std::vector<std::string> dynamic_covariates;
};

StudyPanel load_panel(const std::string& path, const PanelSchema& schema = {});
StudyPanel parse_panel(const std::string& csv_text, const PanelSchema& schema = {});

void save_panel(const std::string& path, const StudyPanel& panel, const PanelSchema& schema = {});
std::string panel_to_csv(const StudyPanel& panel, const PanelSchema& schema = {});

}  // namespace deforsc
