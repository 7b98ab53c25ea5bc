// In-space placebo inference: refit the synthetic control for every donor as
// if it had been treated in the project's treatment year, screen out poor
// pre-treatment fits, and build per-year 95% gap bands.
#pragma once

#include <vector>

#include "deforsc/panel.hpp"
#include "deforsc/sc/types.hpp"

namespace deforsc {

// project_fit: the project's own fit (provides the MSPE yardstick and gap).
// donors: the screened donor units used for that fit. Each placebo uses the
// remaining donors (project excluded) as its donor pool.
PlaceboReport run_placebos(const ScFit& project_fit, const Unit& project,
                           const std::vector<const Unit*>& donors, const ScConfig& cfg);

}  // namespace deforsc
