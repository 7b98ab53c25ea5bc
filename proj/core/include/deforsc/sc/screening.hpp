// Donor screening by clearing pressure, plus the widening orchestration that
// couples screening to split-sample validation.
#pragma once

#include <vector>

#include "deforsc/panel.hpp"
#include "deforsc/sc/types.hpp"

namespace deforsc {

// Mean of the pressure covariate over the project's pre-treatment window.
double pressure_of(const Unit& u, const ScConfig& cfg, int pre_end);

// Pool units whose pressure lies within +-tolerance (relative) of the
// project's. The project itself is excluded if present in the pool.
ScreenResult screen_donors(const Unit& project, const std::vector<const Unit*>& pool,
                           const ScConfig& cfg, double tolerance);

// Full orchestration: screen at the initial tolerance, validate, widen the
// band while validation fails or the pool is empty, and return the final fit.
// If the widest band still yields no donors, throws ScreeningExhaustedError;
// if donors exist but validation never passes, the fit at the widest band is
// returned with validated = false. Panels with fewer pre years than
// cfg.min_validation_pre_years skip validation (validation_ran = false).
ScProjectResult fit_project(const Unit& project, const std::vector<const Unit*>& pool,
                            const ScConfig& cfg);

}  // namespace deforsc
