// Panel -> dense matrices for the GSC estimators: outcome matrix on the
// configured scale, covariate matrices, treated-cell mask, row bookkeeping.
#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "deforsc/gsc/types.hpp"
#include "deforsc/panel.hpp"

namespace deforsc {

struct GscData {
    std::vector<UnitId> ids;             // panel order (lexicographic)
    std::vector<int> years;
    Eigen::MatrixXd Y;                   // n x T
    std::vector<Eigen::MatrixXd> X;      // k matrices, n x T
    std::vector<std::string> covariate_names;
    std::vector<int> treatment_year;     // per row; INT_MAX when never treated
    Eigen::MatrixXd treated;             // n x T, 1.0 on treated cells
    std::vector<int> treated_rows;
    std::vector<int> control_rows;       // untreated throughout the panel

    static constexpr int kNever = std::numeric_limits<int>::max();
    int lead_of(int row, int t_index) const {
        // lead 1 = first treated year.
        return years[static_cast<std::size_t>(t_index)] -
               treatment_year[static_cast<std::size_t>(row)] + 1;
    }
};

GscData build_gsc_data(const StudyPanel& panel, const GscConfig& cfg);

}  // namespace deforsc
