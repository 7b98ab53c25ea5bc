// Matrix-completion estimator: two-way fixed effects + nuclear-norm-penalised
// low-rank component, fitted by EM soft-impute with treated cells masked.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "deforsc/gsc/data.hpp"
#include "deforsc/gsc/types.hpp"

namespace deforsc {

// Fit over all rows of `data` with treated cells masked. `soft_threshold` is
// the absolute singular-value shrinkage level.
GscModel fit_matrix_completion(const GscData& data, double soft_threshold, const GscConfig& cfg);

// Shrinkage levels indexed by the integer hyper-parameter 0..factor_max:
// index 0 = heaviest shrinkage, last index = 0 (no regularisation). Levels are
// fractions of the top singular value of the two-way-demeaned outcome.
std::vector<double> mc_threshold_grid(const GscData& data, const GscConfig& cfg);

}  // namespace deforsc
