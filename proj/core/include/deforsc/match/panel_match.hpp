// Panel matching: each treated unit is matched, at its treatment year, to
// units that are not yet treated and stay untreated through the evaluated
// lead, using the similarity of their outcome/covariate histories over a
// fixed window. Three refinements: Mahalanobis distance on the stacked
// history, propensity-score nearest neighbours, and propensity-odds weights.
#pragma once

#include "deforsc/match/types.hpp"
#include "deforsc/panel.hpp"

namespace deforsc {

// Matched sets for every treated unit and every lead 1..cfg.max_lead whose
// evaluation year lies inside the panel. Treated units without eligible
// candidates at a lead get no set there (noted in the result).
PanelMatchResult panel_match(const StudyPanel& panel, const PanelMatchConfig& cfg);

// Eligibility predicate (exposed for tests): can `candidate` serve as a
// control for `treated` at `lead`?
bool eligible_control(const Unit& treated, const Unit& candidate, int lead);

}  // namespace deforsc
