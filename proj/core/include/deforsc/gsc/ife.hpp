// Masked alternating-least-squares core for interactive fixed effects, the
// IFE estimator itself, and the pre-period projection that recovers treated
// units' loadings.
#pragma once

#include <Eigen/Dense>

#include "deforsc/gsc/data.hpp"
#include "deforsc/gsc/types.hpp"

namespace deforsc {

// Fit alpha_i + xi_t + X'beta + L on the observed (mask != 0) cells of Y.
// Masked cells are EM-imputed from the current fit before every factor SVD.
// hard rank: L = best rank-`rank` approximation; soft (matrix completion):
// singular values are shrunk by `soft_threshold` and the resulting rank kept.
// Throws DomainError for impossible ranks or fully masked rows/columns,
// NumericError when ALS exhausts its iteration budget without converging.
GscModel fit_masked(const Eigen::MatrixXd& Y, const std::vector<Eigen::MatrixXd>& X,
                    const Eigen::MatrixXd& observed, int rank, bool soft, double soft_threshold,
                    const GscConfig& cfg);

// Interactive fixed effects on the control rows of `data` (fully observed).
GscModel fit_ife(const GscData& data, int rank, const GscConfig& cfg);

// Least-squares projection of a treated unit onto the fitted factor space
// using its pre-treatment years: returns (alpha_i, lambda_i). y/x row vectors
// span the model's years; n_pre = number of leading years to use. Requires
// n_pre >= max(1, rank) (minimum-norm solution when the design is square).
std::pair<double, Eigen::VectorXd> project_loadings(const GscModel& model,
                                                    const Eigen::VectorXd& y,
                                                    const std::vector<Eigen::VectorXd>& x,
                                                    int n_pre);

}  // namespace deforsc
