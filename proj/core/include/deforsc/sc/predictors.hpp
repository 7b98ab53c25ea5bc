// Predictor assembly for SC fits: named covariates (statics, pre-window means
// of dynamics, outcome aggregates) plus one cumulative-outcome path row per
// pre-treatment year. Rows are standardised across {project} u donors; since
// donor weights sum to one the centring cancels in every residual, so
// standardisation only rescales rows.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "deforsc/panel.hpp"
#include "deforsc/sc/types.hpp"

namespace deforsc {

struct PredictorMatrix {
    std::vector<std::string> names;      // kept rows, named then cum_defor@YYYY
    std::vector<std::string> dropped;    // zero-variance rows
    Eigen::VectorXd project;             // standardised, p
    Eigen::MatrixXd donors;              // standardised, p x n
    Eigen::VectorXd raw_project;         // unstandardised values (kept rows)
    Eigen::MatrixXd raw_donors;
    Eigen::VectorXd row_sd;              // scale used per kept row
    std::vector<int> path_rows;          // indices of cum_defor@ rows
    std::vector<UnitId> donor_ids;
};

// Value of one named predictor for a unit, pre years [series start, pre_end).
double predictor_value(const Unit& u, const std::string& name, int pre_end);

// Resolve an empty covariate list to the auto set: outcome aggregates plus
// every covariate carried by the reference unit (sorted names).
std::vector<std::string> resolve_covariates(const std::vector<std::string>& requested,
                                            const Unit& reference);

PredictorMatrix build_predictors(const Unit& project, const std::vector<const Unit*>& donors,
                                 const std::vector<std::string>& covariates, int pre_end);

}  // namespace deforsc
