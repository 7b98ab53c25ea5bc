// Difference-in-differences over the matched sets: per treated unit, the
// outcome change from the year before treatment to the evaluated lead year,
// minus the weighted control change; averaged over treated units per lead.
// Uncertainty comes from a seeded bootstrap that resamples treated units
// together with their matched sets.
#pragma once

#include <vector>

#include "deforsc/match/types.hpp"
#include "deforsc/panel.hpp"

namespace deforsc {

// One row per lead that has at least one matched set. Effects are reported
// on both scales: hectares/year and % of unit area/year.
std::vector<PanelAttRow> panel_att(const StudyPanel& panel, const PanelMatchResult& matches,
                                   const PanelMatchConfig& cfg);

}  // namespace deforsc
