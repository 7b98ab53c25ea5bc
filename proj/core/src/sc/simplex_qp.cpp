#include "deforsc/sc/simplex_qp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "deforsc/errors.hpp"

namespace deforsc {

namespace {

// Largest eigenvalue of a symmetric PSD matrix via power iteration; a small
// floor keeps step sizes finite for the zero matrix.
double spectral_norm(const Eigen::MatrixXd& Q) {
    const int n = static_cast<int>(Q.rows());
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double lambda = 0.0;
    for (int it = 0; it < 60; ++it) {
        Eigen::VectorXd y = Q * x;
        double ny = y.norm();
        if (ny <= 0.0) break;
        x = y / ny;
        lambda = ny;
    }
    return std::max(lambda, 1e-30);
}

// Equality-constrained minimiser restricted to support S:
//   [2Q_S  1] [w_S]   [2c_S]
//   [1'    0] [ mu] = [  1 ]
// Solved with a complete orthogonal decomposition so singular reduced systems
// (duplicate donors) get the minimum-norm solution deterministically.
void solve_support(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c,
                   const std::vector<int>& support, Eigen::VectorXd& w_s, double& mu) {
    const int s = static_cast<int>(support.size());
    Eigen::MatrixXd K(s + 1, s + 1);
    Eigen::VectorXd rhs(s + 1);
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) K(i, j) = 2.0 * Q(support[i], support[j]);
        K(i, s) = 1.0;
        K(s, i) = 1.0;
        rhs(i) = 2.0 * c(support[i]);
    }
    K(s, s) = 0.0;
    rhs(s) = 1.0;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(K);
    Eigen::VectorXd sol = cod.solve(rhs);
    w_s = sol.head(s);
    mu = sol(s);
}

}  // namespace

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& y) {
    const int n = static_cast<int>(y.size());
    std::vector<double> u(y.data(), y.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    int rho = 0;
    for (int i = 0; i < n; ++i) {
        css += u[static_cast<std::size_t>(i)];
        double t = (css - 1.0) / (i + 1);
        if (u[static_cast<std::size_t>(i)] - t > 0.0) {
            rho = i + 1;
            theta = t;
        }
    }
    (void)rho;
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = std::max(0.0, y(i) - theta);
    return w;
}

SimplexQpSolution solve_simplex_qp(const Eigen::MatrixXd& X0, const Eigen::VectorXd& x1,
                                   const Eigen::VectorXd& v, double tol, int max_iterations) {
    const int p = static_cast<int>(X0.rows());
    const int n = static_cast<int>(X0.cols());
    if (n == 0) throw DomainError("simplex QP: no donors");
    if (x1.size() != p) throw DomainError("simplex QP: x1/X0 shape mismatch");
    if (v.size() != p) throw DomainError("simplex QP: v/X0 shape mismatch");
    for (int i = 0; i < p; ++i) {
        if (!(v(i) >= 0.0) || !std::isfinite(v(i)))
            throw DomainError("simplex QP: predictor weights must be finite and non-negative");
    }

    SimplexQpSolution out;
    auto objective = [&](const Eigen::VectorXd& w) {
        Eigen::VectorXd r = x1 - X0 * w;
        return std::max(0.0, r.cwiseProduct(v.cwiseProduct(r)).sum());
    };

    if (n == 1) {
        out.w = Eigen::VectorXd::Ones(1);
        out.objective = objective(out.w);
        out.kkt_residual = 0.0;
        return out;
    }

    // Weighted normal-equation form: objective = w'Qw - 2c'w + const.
    Eigen::MatrixXd Xv = v.asDiagonal() * X0;         // p x n
    Eigen::MatrixXd Q = X0.transpose() * Xv;          // n x n PSD
    Eigen::VectorXd c = X0.transpose() * (v.cwiseProduct(x1));
    Q = 0.5 * (Q + Q.transpose());                    // symmetrise roundoff

    const double L = std::max(2.0 * spectral_norm(Q), 1e-12);
    auto kkt_residual = [&](const Eigen::VectorXd& w) {
        Eigen::VectorXd g = 2.0 * (Q * w - c);
        return (w - project_to_simplex(w - g / L)).cwiseAbs().maxCoeff();
    };

    if (max_iterations <= 0) max_iterations = 50 * n + 200;

    // --- exact active-set phase ---
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / n);
    std::vector<int> support(static_cast<std::size_t>(n));
    std::iota(support.begin(), support.end(), 0);
    const double drop_eps = 1e-12;
    int iter = 0;
    bool converged = false;
    while (iter++ < max_iterations) {
        Eigen::VectorXd ws;
        double mu = 0.0;
        solve_support(Q, c, support, ws, mu);

        if (ws.minCoeff() < -drop_eps) {
            // Step from the current feasible point toward ws until the first
            // coordinate hits zero, then shrink the support.
            double alpha = 1.0;
            for (std::size_t i = 0; i < support.size(); ++i) {
                double wi = w(support[i]);
                double delta = ws(static_cast<int>(i)) - wi;
                if (ws(static_cast<int>(i)) < -drop_eps && delta < 0.0)
                    alpha = std::min(alpha, -wi / delta);
            }
            alpha = std::clamp(alpha, 0.0, 1.0);
            Eigen::VectorXd w_next = Eigen::VectorXd::Zero(n);
            std::vector<int> kept;
            for (std::size_t i = 0; i < support.size(); ++i) {
                double wi = w(support[i]);
                double nw = wi + alpha * (ws(static_cast<int>(i)) - wi);
                if (nw > drop_eps) {
                    kept.push_back(support[i]);
                    w_next(support[i]) = nw;
                } else if (kept.empty() && i + 1 == support.size()) {
                    // Never empty the support entirely.
                    kept.push_back(support[i]);
                    w_next(support[i]) = std::max(nw, 0.0);
                }
            }
            support = std::move(kept);
            w = w_next;
            double total = w.sum();
            if (total > 0.0) w /= total;
            continue;
        }

        // Feasible on the support: adopt it and test outside gradients.
        w.setZero();
        for (std::size_t i = 0; i < support.size(); ++i)
            w(support[i]) = std::max(0.0, ws(static_cast<int>(i)));
        w /= w.sum();

        Eigen::VectorXd g = 2.0 * (Q * w - c);
        int enter = -1;
        double worst = -tol * std::max(1.0, L);
        std::vector<char> in_support(static_cast<std::size_t>(n), 0);
        for (int s : support) in_support[static_cast<std::size_t>(s)] = 1;
        for (int j = 0; j < n; ++j) {
            if (in_support[static_cast<std::size_t>(j)]) continue;
            double slack = g(j) - mu;  // must be >= 0 at the optimum
            if (slack < worst) {
                worst = slack;
                enter = j;
            }
        }
        if (enter < 0) {
            converged = true;
            break;
        }
        support.push_back(enter);
        std::sort(support.begin(), support.end());
    }

    double res = kkt_residual(w);
    if (!converged || res > tol) {
        // --- projected-gradient (FISTA) fallback/polish ---
        Eigen::VectorXd y = w, w_prev = w;
        double t = 1.0;
        const int polish_cap = 200000;
        int k = 0;
        for (; k < polish_cap; ++k) {
            Eigen::VectorXd g = 2.0 * (Q * y - c);
            Eigen::VectorXd w_next = project_to_simplex(y - g / L);
            double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            y = w_next + ((t - 1.0) / t_next) * (w_next - w_prev);
            w_prev = w_next;
            t = t_next;
            if (k % 64 == 0) {
                res = kkt_residual(w_next);
                if (res <= tol) {
                    w = w_next;
                    break;
                }
            }
            w = w_next;
        }
        iter += k;
        res = kkt_residual(w);
        if (res > std::max(tol * 1e3, 1e-7))
            throw NumericError("simplex QP did not converge: kkt residual " +
                               std::to_string(res) + " after " + std::to_string(iter) +
                               " iterations (n=" + std::to_string(n) + ")");
    }

    // Tidy: clamp tiny negatives and renormalise so invariants hold exactly.
    for (int i = 0; i < n; ++i) w(i) = std::max(0.0, w(i));
    w /= w.sum();

    out.w = w;
    out.objective = objective(w);
    out.kkt_residual = res;
    out.iterations = iter;
    return out;
}

}  // namespace deforsc
