// Hyper-parameter cross-validation on masked control pre-treatment cells.
#pragma once

#include <vector>

#include "deforsc/gsc/data.hpp"
#include "deforsc/gsc/types.hpp"

namespace deforsc {

struct CvResult {
    int selected = 0;              // index in factor_min..factor_max
    std::vector<double> mse;       // per candidate, same indexing
};

// Candidates are factor counts (IFE) or shrinkage levels (matrix completion).
// Held-out cells are control-row cells in pre-treatment years (before the
// earliest treated unit's treatment year; the whole span when nothing is
// treated), split into cfg.cv_folds seeded folds. Ties pick the smaller model.
CvResult cross_validate(const GscData& data, const GscConfig& cfg);

}  // namespace deforsc
