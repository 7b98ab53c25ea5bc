// Covariate balance table for a fitted synthetic control: per predictor, the
// outer weight, the project value, the synthetic (donor-weighted) value, and
// the unweighted donor-pool average.
#pragma once

#include <vector>

#include "deforsc/panel.hpp"
#include "deforsc/sc/types.hpp"

namespace deforsc {

std::vector<BalanceRow> balance_table(const ScFit& fit, const Unit& project,
                                      const std::vector<const Unit*>& donors);

}  // namespace deforsc
