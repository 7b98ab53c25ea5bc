#include "deforsc/gsc/matrix_completion.hpp"

#include <cmath>

#include "deforsc/errors.hpp"
#include "deforsc/gsc/ife.hpp"

namespace deforsc {

GscModel fit_matrix_completion(const GscData& data, double soft_threshold, const GscConfig& cfg) {
    const Eigen::MatrixXd observed =
        (Eigen::MatrixXd::Ones(data.Y.rows(), data.Y.cols()) - data.treated).eval();
    GscModel m = fit_masked(data.Y, data.X, observed, 0, true, soft_threshold, cfg);
    m.unit_ids = data.ids;
    m.years = data.years;
    m.covariate_names = data.covariate_names;
    return m;
}

std::vector<double> mc_threshold_grid(const GscData& data, const GscConfig& cfg) {
    // Scale anchor: top singular value of the two-way-demeaned untreated cells
    // (masked cells imputed at zero after demeaning).
    const int n = static_cast<int>(data.Y.rows());
    const int T = static_cast<int>(data.Y.cols());
    Eigen::MatrixXd R = data.Y;
    Eigen::MatrixXd W = Eigen::MatrixXd::Ones(n, T) - data.treated;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(T);
    for (int pass = 0; pass < 3; ++pass) {
        for (int i = 0; i < n; ++i) {
            double num = 0.0, den = 0.0;
            for (int t = 0; t < T; ++t)
                if (W(i, t) != 0.0) {
                    num += R(i, t) - xi(t);
                    den += 1.0;
                }
            alpha(i) = den > 0.0 ? num / den : 0.0;
        }
        for (int t = 0; t < T; ++t) {
            double num = 0.0, den = 0.0;
            for (int i = 0; i < n; ++i)
                if (W(i, t) != 0.0) {
                    num += R(i, t) - alpha(i);
                    den += 1.0;
                }
            xi(t) = den > 0.0 ? num / den : 0.0;
        }
    }
    Eigen::MatrixXd D(n, T);
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < T; ++t)
            D(i, t) = W(i, t) != 0.0 ? R(i, t) - alpha(i) - xi(t) : 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(D);
    const double top = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;

    const int levels = cfg.factor_max - cfg.factor_min + 1;
    if (levels < 1) throw DomainError("gsc: empty hyper-parameter range");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(levels));
    // Geometric descent from strong shrinkage to none; the final level is
    // exactly zero so an unregularised grid point always exists.
    for (int i = 0; i < levels - 1; ++i)
        grid.push_back(top * 0.8 * std::pow(0.25, i));
    grid.push_back(0.0);
    return grid;
}

}  // namespace deforsc
