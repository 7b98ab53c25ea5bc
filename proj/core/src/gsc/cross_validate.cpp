#include "deforsc/gsc/cross_validate.hpp"

#include <algorithm>
#include <limits>

#include "deforsc/errors.hpp"
#include "deforsc/gsc/ife.hpp"
#include "deforsc/gsc/matrix_completion.hpp"
#include "deforsc/util/rng.hpp"

namespace deforsc {

CvResult cross_validate(const GscData& data, const GscConfig& cfg) {
    const int T = static_cast<int>(data.years.size());
    if (data.control_rows.size() < 2)
        throw DomainError("gsc cv: need at least 2 control units");
    if (cfg.cv_folds < 2) throw DomainError("gsc cv: need at least 2 folds");

    // Held-out universe: control cells in pre-treatment years.
    int min_ty = GscData::kNever;
    for (int i : data.treated_rows)
        min_ty = std::min(min_ty, data.treatment_year[static_cast<std::size_t>(i)]);
    std::vector<std::pair<int, int>> cells;  // (row, t)
    for (int i : data.control_rows)
        for (int t = 0; t < T; ++t)
            if (data.years[static_cast<std::size_t>(t)] < min_ty) cells.emplace_back(i, t);
    if (static_cast<int>(cells.size()) < cfg.cv_folds)
        throw DomainError("gsc cv: only " + std::to_string(cells.size()) +
                          " maskable control pre-treatment cells for " +
                          std::to_string(cfg.cv_folds) + " folds");

    auto rng = make_rng(cfg.seed, 9001);
    shuffle(rng, cells);

    const int n = static_cast<int>(data.Y.rows());
    const Eigen::MatrixXd untreated = Eigen::MatrixXd::Ones(n, T) - data.treated;

    const int levels = cfg.factor_max - cfg.factor_min + 1;
    const std::vector<double> grid = cfg.estimator == GscEstimator::MatrixCompletion
                                         ? mc_threshold_grid(data, cfg)
                                         : std::vector<double>();

    CvResult res;
    res.mse.assign(static_cast<std::size_t>(levels), 0.0);
    std::vector<double> sse(static_cast<std::size_t>(levels), 0.0);

    for (int fold = 0; fold < cfg.cv_folds; ++fold) {
        // Round-robin assignment over the shuffled cell list.
        Eigen::MatrixXd held = Eigen::MatrixXd::Zero(n, T);
        for (std::size_t ci = fold; ci < cells.size(); ci += static_cast<std::size_t>(cfg.cv_folds))
            held(cells[ci].first, cells[ci].second) = 1.0;

        for (int c = 0; c < levels; ++c) {
            const int candidate = cfg.factor_min + c;
            Eigen::MatrixXd cf;
            if (cfg.estimator == GscEstimator::MatrixCompletion) {
                Eigen::MatrixXd observed = untreated - held;
                GscModel m = fit_masked(data.Y, data.X, observed.cwiseMax(0.0), 0, true,
                                        grid[static_cast<std::size_t>(c)], cfg);
                cf.resize(n, T);
                for (int i = 0; i < n; ++i) cf.row(i) = m.fitted_row(i, data.X).transpose();
            } else {
                // IFE: fit on the control-row submatrix with held cells masked.
                const int nc = static_cast<int>(data.control_rows.size());
                Eigen::MatrixXd Yc(nc, T), Wc(nc, T);
                std::vector<Eigen::MatrixXd> Xc(data.X.size(), Eigen::MatrixXd(nc, T));
                for (int i = 0; i < nc; ++i) {
                    const int row = data.control_rows[static_cast<std::size_t>(i)];
                    Yc.row(i) = data.Y.row(row);
                    Wc.row(i) = (Eigen::RowVectorXd::Ones(T) - held.row(row));
                    for (std::size_t j = 0; j < Xc.size(); ++j) Xc[j].row(i) = data.X[j].row(row);
                }
                GscModel m = fit_masked(Yc, Xc, Wc, candidate, false, 0.0, cfg);
                cf.resize(n, T);
                cf.setZero();
                for (int i = 0; i < nc; ++i)
                    cf.row(data.control_rows[static_cast<std::size_t>(i)]) =
                        m.fitted_row(i, Xc).transpose();
            }
            for (std::size_t ci = fold; ci < cells.size();
                 ci += static_cast<std::size_t>(cfg.cv_folds)) {
                const double e = data.Y(cells[ci].first, cells[ci].second) -
                                 cf(cells[ci].first, cells[ci].second);
                sse[static_cast<std::size_t>(c)] += e * e;
            }
        }
    }

    for (int c = 0; c < levels; ++c)
        res.mse[static_cast<std::size_t>(c)] =
            sse[static_cast<std::size_t>(c)] / static_cast<double>(cells.size());
    // Ties break toward the smaller model (lower index = fewer factors or
    // heavier shrinkage).
    int best = 0;
    for (int c = 1; c < levels; ++c)
        if (res.mse[static_cast<std::size_t>(c)] < res.mse[static_cast<std::size_t>(best)])
            best = c;
    res.selected = cfg.factor_min + best;
    return res;
}

}  // namespace deforsc
