// Genetic matching: a genetic algorithm searches diagonal metric weights so
// the worst post-match covariate imbalance (|SMD|) is minimised. The identity
// metric is always seeded into the population and elitism keeps the best
// individual, so the result is never worse than plain Mahalanobis-style
// matching on standardised covariates.
#pragma once

#include <vector>

#include "deforsc/match/types.hpp"
#include "deforsc/panel.hpp"

namespace deforsc {

GeneticMatchResult genetic_match(const Unit& treated, const std::vector<const Unit*>& pool,
                                 const GeneticConfig& cfg);

}  // namespace deforsc
