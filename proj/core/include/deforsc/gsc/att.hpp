// Treatment-effect estimation: counterfactuals for treated units from the
// configured estimator, per-lead ATTs, and seeded bootstrap inference.
#pragma once

#include "deforsc/gsc/data.hpp"
#include "deforsc/gsc/types.hpp"
#include "deforsc/panel.hpp"

namespace deforsc {

// Full pipeline on a panel: hyper-parameter selection (when cfg.factors < 0),
// model fit, counterfactuals, per-lead ATT table, bootstrap standard errors /
// 95% CIs / two-sided normal p-values.
GscResult estimate_att(const StudyPanel& panel, const GscConfig& cfg);

}  // namespace deforsc
