#include "deforsc/gsc/ife.hpp"

#include <cmath>
#include <limits>

#include "deforsc/errors.hpp"

namespace deforsc {

namespace {

// Weighted two-way fixed effects + covariate slopes on observed cells of R:
// alternates alpha/xi/beta updates a few times (full convergence comes from
// the surrounding ALS loop).
void update_fe_beta(const Eigen::MatrixXd& R, const std::vector<Eigen::MatrixXd>& X,
                    const Eigen::MatrixXd& W, Eigen::VectorXd& alpha, Eigen::VectorXd& xi,
                    Eigen::VectorXd& beta) {
    const int n = static_cast<int>(R.rows());
    const int T = static_cast<int>(R.cols());
    const int k = static_cast<int>(X.size());

    Eigen::MatrixXd Xb = Eigen::MatrixXd::Zero(n, T);
    for (int j = 0; j < k; ++j) Xb += beta(j) * X[static_cast<std::size_t>(j)];

    for (int pass = 0; pass < 3; ++pass) {
        // alpha_i | xi, beta
        for (int i = 0; i < n; ++i) {
            double num = 0.0, den = 0.0;
            for (int t = 0; t < T; ++t) {
                if (W(i, t) == 0.0) continue;
                num += R(i, t) - xi(t) - Xb(i, t);
                den += 1.0;
            }
            alpha(i) = den > 0.0 ? num / den : 0.0;
        }
        // xi_t | alpha, beta
        for (int t = 0; t < T; ++t) {
            double num = 0.0, den = 0.0;
            for (int i = 0; i < n; ++i) {
                if (W(i, t) == 0.0) continue;
                num += R(i, t) - alpha(i) - Xb(i, t);
                den += 1.0;
            }
            xi(t) = den > 0.0 ? num / den : 0.0;
        }
        if (k == 0) continue;
        // beta | alpha, xi : small normal equations over observed cells
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(k, k);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
        for (int i = 0; i < n; ++i) {
            for (int t = 0; t < T; ++t) {
                if (W(i, t) == 0.0) continue;
                const double r = R(i, t) - alpha(i) - xi(t);
                for (int a = 0; a < k; ++a) {
                    const double xa = X[static_cast<std::size_t>(a)](i, t);
                    b(a) += xa * r;
                    for (int c = 0; c <= a; ++c)
                        G(a, c) += xa * X[static_cast<std::size_t>(c)](i, t);
                }
            }
        }
        G = G.selfadjointView<Eigen::Lower>();
        // Tiny ridge keeps collinear covariates from blowing up the solve.
        G.diagonal().array() += 1e-10 * (G.trace() / k + 1.0);
        beta = G.ldlt().solve(b);
        Xb.setZero();
        for (int j = 0; j < k; ++j) Xb += beta(j) * X[static_cast<std::size_t>(j)];
    }
}

}  // namespace

Eigen::VectorXd GscModel::fitted_row(int row, const std::vector<Eigen::MatrixXd>& X) const {
    const int T = static_cast<int>(years.size());
    Eigen::VectorXd out(T);
    for (int t = 0; t < T; ++t) {
        double v = alpha(row) + xi(t);
        for (int j = 0; j < static_cast<int>(X.size()); ++j)
            v += beta(j) * X[static_cast<std::size_t>(j)](row, t);
        if (rank > 0) v += lambda.row(row).dot(factors.row(t));
        out(t) = v;
    }
    return out;
}

GscModel fit_masked(const Eigen::MatrixXd& Y, const std::vector<Eigen::MatrixXd>& X,
                    const Eigen::MatrixXd& observed, int rank, bool soft, double soft_threshold,
                    const GscConfig& cfg) {
    const int n = static_cast<int>(Y.rows());
    const int T = static_cast<int>(Y.cols());
    const int k = static_cast<int>(X.size());
    if (n < 1 || T < 1) throw DomainError("gsc: empty panel");
    if (!soft && (rank < 0 || rank > std::min(n, T) - 1))
        throw DomainError("gsc: rank " + std::to_string(rank) + " out of range for a " +
                          std::to_string(n) + "x" + std::to_string(T) + " panel");
    for (int i = 0; i < n; ++i)
        if (observed.row(i).sum() == 0.0)
            throw DomainError("gsc: unit row " + std::to_string(i) + " is fully masked");
    for (int t = 0; t < T; ++t)
        if (observed.col(t).sum() == 0.0)
            throw DomainError("gsc: year column " + std::to_string(t) + " is fully masked");

    GscModel m;
    m.alpha = Eigen::VectorXd::Zero(n);
    m.xi = Eigen::VectorXd::Zero(T);
    m.beta = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, T);

    const double obs_count = observed.sum();
    double prev_sse = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < cfg.als_max_iterations; ++it) {
        // (1) FE + beta on the factor-adjusted residual.
        Eigen::MatrixXd R1 = Y - L;
        update_fe_beta(R1, X, observed, m.alpha, m.xi, m.beta);

        // (2) EM-complete the systematic residual, then low-rank step.
        Eigen::MatrixXd R2 = Y;
        for (int j = 0; j < k; ++j) R2 -= m.beta(j) * X[static_cast<std::size_t>(j)];
        R2.colwise() -= m.alpha;
        R2.rowwise() -= m.xi.transpose();
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < T; ++t)
                if (observed(i, t) == 0.0) R2(i, t) = L(i, t);

        double effective_rank = 0;
        if (soft || rank > 0) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(R2, Eigen::ComputeThinU | Eigen::ComputeThinV);
            Eigen::VectorXd s = svd.singularValues();
            int keep = 0;
            if (soft) {
                for (int i = 0; i < s.size(); ++i) {
                    s(i) = std::max(0.0, s(i) - soft_threshold);
                    if (s(i) > 0.0) keep = i + 1;
                }
            } else {
                keep = std::min<int>(rank, static_cast<int>(s.size()));
                for (int i = keep; i < s.size(); ++i) s(i) = 0.0;
            }
            L = svd.matrixU().leftCols(keep) * s.head(keep).asDiagonal() *
                svd.matrixV().leftCols(keep).transpose();
            if (keep == 0) L.setZero();
            effective_rank = keep;
        } else {
            L.setZero();
        }
        m.rank = static_cast<int>(effective_rank);

        // (3) observed-cell SSE and convergence test.
        double sse = 0.0;
        Eigen::MatrixXd fit = L;
        for (int j = 0; j < k; ++j) fit += m.beta(j) * X[static_cast<std::size_t>(j)];
        fit.colwise() += m.alpha;
        fit.rowwise() += m.xi.transpose();
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < T; ++t)
                if (observed(i, t) != 0.0) {
                    const double e = Y(i, t) - fit(i, t);
                    sse += e * e;
                }
        m.objective = sse;
        const double denom = std::max(1.0, prev_sse);
        if (std::isfinite(prev_sse) && prev_sse - sse <= cfg.als_tol * denom &&
            prev_sse - sse >= -cfg.als_tol * denom) {
            m.converged = true;
            ++it;
            break;
        }
        prev_sse = sse;
    }
    m.iterations = it;
    if (!m.converged && cfg.als_max_iterations > 0 && (soft || rank > 0))
        throw NumericError("gsc ALS did not converge in " +
                           std::to_string(cfg.als_max_iterations) + " iterations (sse " +
                           std::to_string(m.objective) + ")");
    if (rank == 0 && !soft) m.converged = true;

    // Identification: common level into xi, factor normalisation F'F/T = I.
    const double abar = m.alpha.mean();
    m.alpha.array() -= abar;
    m.xi.array() += abar;
    if (m.rank > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const int r = m.rank;
        const double sqT = std::sqrt(static_cast<double>(T));
        m.factors = sqT * svd.matrixV().leftCols(r);
        m.lambda = svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() / sqT;
    } else {
        m.factors = Eigen::MatrixXd::Zero(T, 0);
        m.lambda = Eigen::MatrixXd::Zero(n, 0);
    }
    m.soft_threshold = soft ? soft_threshold : 0.0;
    (void)obs_count;
    return m;
}

GscModel fit_ife(const GscData& data, int rank, const GscConfig& cfg) {
    const int nc = static_cast<int>(data.control_rows.size());
    if (nc < 2) throw DomainError("gsc: need at least 2 control units");
    const int T = static_cast<int>(data.years.size());
    Eigen::MatrixXd Y(nc, T);
    std::vector<Eigen::MatrixXd> X(data.X.size(), Eigen::MatrixXd(nc, T));
    for (int i = 0; i < nc; ++i) {
        Y.row(i) = data.Y.row(data.control_rows[static_cast<std::size_t>(i)]);
        for (std::size_t j = 0; j < X.size(); ++j)
            X[j].row(i) = data.X[j].row(data.control_rows[static_cast<std::size_t>(i)]);
    }
    GscModel m = fit_masked(Y, X, Eigen::MatrixXd::Ones(nc, T), rank, false, 0.0, cfg);
    for (int i = 0; i < nc; ++i)
        m.unit_ids.push_back(data.ids[static_cast<std::size_t>(data.control_rows[static_cast<std::size_t>(i)])]);
    m.years = data.years;
    m.covariate_names = data.covariate_names;
    return m;
}

std::pair<double, Eigen::VectorXd> project_loadings(const GscModel& model,
                                                    const Eigen::VectorXd& y,
                                                    const std::vector<Eigen::VectorXd>& x,
                                                    int n_pre) {
    const int r = model.rank;
    if (n_pre < 1 || n_pre < r)
        throw DomainError("gsc: " + std::to_string(n_pre) +
                          " pre-treatment years cannot identify " + std::to_string(r) +
                          " factor loadings");
    Eigen::VectorXd resid(n_pre);
    for (int t = 0; t < n_pre; ++t) {
        double v = y(t) - model.xi(t);
        for (int j = 0; j < static_cast<int>(x.size()); ++j)
            v -= model.beta(j) * x[static_cast<std::size_t>(j)](t);
        resid(t) = v;
    }
    Eigen::MatrixXd D(n_pre, r + 1);
    D.col(0).setOnes();
    for (int t = 0; t < n_pre; ++t)
        for (int j = 0; j < r; ++j) D(t, j + 1) = model.factors(t, j);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(D);
    Eigen::VectorXd sol = cod.solve(resid);
    return {sol(0), sol.tail(r)};
}

}  // namespace deforsc
