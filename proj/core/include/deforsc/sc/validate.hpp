// Split-sample validation: refit the synthetic control on the first half of
// the pre-treatment window and check how far the synthetic trajectory drifts
// from the project over the held-out second half.
#pragma once

#include <vector>

#include "deforsc/panel.hpp"
#include "deforsc/sc/types.hpp"

namespace deforsc {

// The pass rule on a precomputed terminal gap: |gap| / area < threshold.
bool validation_passes(double gap_ha, double area_ha, double threshold);

// donors: the (already screened) donor units. Requires at least
// cfg.min_validation_pre_years pre-treatment years; odd windows put the extra
// year in training. Passes when |terminal gap| / project area falls below
// cfg.validation_threshold, where the terminal gap is the cumulative
// difference at the last pre-treatment year.
ValidationResult validate_split(const Unit& project, const std::vector<const Unit*>& donors,
                                const ScConfig& cfg);

}  // namespace deforsc
