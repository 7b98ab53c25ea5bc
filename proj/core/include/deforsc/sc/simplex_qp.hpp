// Inner synthetic-control solver: minimise (x1 - X0 w)' diag(v) (x1 - X0 w)
// over the unit simplex (w >= 0, sum w = 1). Exact active-set method with a
// projected-gradient fallback; returns the KKT fixed-point residual so callers
// can assert optimality.
#pragma once

#include <Eigen/Dense>

namespace deforsc {

struct SimplexQpSolution {
    Eigen::VectorXd w;
    double objective = 0.0;      // weighted squared residual at w
    double kkt_residual = 0.0;   // ||w - P(w - g/L)||_inf, 0 at the optimum
    int iterations = 0;
};

// X0: predictors x donors, x1: predictors, v: non-negative predictor weights.
// tol bounds the KKT residual; max_iterations = 0 picks a size-based budget.
// Throws DomainError on shape errors / no donors, NumericError if the
// tolerance cannot be met.
SimplexQpSolution solve_simplex_qp(const Eigen::MatrixXd& X0, const Eigen::VectorXd& x1,
                                   const Eigen::VectorXd& v, double tol = 1e-10,
                                   int max_iterations = 0);

// Euclidean projection onto the unit simplex (exposed for tests).
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& y);

}  // namespace deforsc
