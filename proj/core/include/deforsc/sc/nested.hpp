// Nested synthetic-control optimisation: an outer derivative-free search over
// predictor weights V (Nelder-Mead on softmax coordinates, multi-start) wraps
// the exact inner simplex QP over donor weights W. The outer objective is the
// pre-treatment MSPE of the cumulative outcome. Because the cumulative path
// years are always included as predictors, a V concentrated on them (evaluated
// as a fixed candidate) already makes the inner solution the exact simplex
// MSPE minimiser, so the returned fit is never worse than that.
#pragma once

#include <vector>

#include "deforsc/panel.hpp"
#include "deforsc/sc/types.hpp"

namespace deforsc {

// Fit a synthetic control for `project` from `donors`. The pre period is
// [panel start, project.treatment_year); untreated units use the whole span
// (placebo machinery passes copies with an as-if treatment year).
ScFit solve_nested(const Unit& project, const std::vector<const Unit*>& donors,
                   const ScConfig& cfg);

// Convenience overload for owning containers.
ScFit solve_nested(const Unit& project, const std::vector<Unit>& donors, const ScConfig& cfg);

// Pre-treatment MSPE of an arbitrary (possibly user-supplied) donor weighting,
// for diagnostics and dominance checks: mean squared cumulative gap over the
// pre years. Weights must cover a subset of the donor ids.
double pre_mspe_of_weights(const Unit& project, const std::vector<const Unit*>& donors,
                           const std::map<UnitId, double>& donor_weights, int pre_end);

}  // namespace deforsc
