#include "deforsc/gsc/att.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "deforsc/errors.hpp"
#include "deforsc/gsc/cross_validate.hpp"
#include "deforsc/gsc/ife.hpp"
#include "deforsc/gsc/matrix_completion.hpp"
#include "deforsc/util/rng.hpp"
#include "deforsc/util/stats.hpp"

namespace deforsc {

namespace {

// One model fit plus the systematic (counterfactual) value for every cell.
// Works on raw matrices so the bootstrap can reuse it on resampled panels.
struct CfFit {
    GscModel model;
    Eigen::MatrixXd cf;  // n x T
};

CfFit fit_counterfactual(const Eigen::MatrixXd& Y, const std::vector<Eigen::MatrixXd>& X,
                         const std::vector<int>& treatment_year, const std::vector<int>& years,
                         int rank_candidate, double threshold, const GscConfig& cfg) {
    const int n = static_cast<int>(Y.rows());
    const int T = static_cast<int>(Y.cols());
    std::vector<int> controls, treated;
    Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(n, T);
    for (int i = 0; i < n; ++i) {
        bool any = false;
        for (int t = 0; t < T; ++t)
            if (years[static_cast<std::size_t>(t)] >= treatment_year[static_cast<std::size_t>(i)]) {
                mask(i, t) = 1.0;
                any = true;
            }
        (any ? treated : controls).push_back(i);
    }

    CfFit out;
    out.cf.resize(n, T);
    if (cfg.estimator == GscEstimator::MatrixCompletion) {
        const Eigen::MatrixXd observed = Eigen::MatrixXd::Ones(n, T) - mask;
        out.model = fit_masked(Y, X, observed, 0, true, threshold, cfg);
        for (int i = 0; i < n; ++i) out.cf.row(i) = out.model.fitted_row(i, X).transpose();
        return out;
    }

    // IFE: fit on controls, project every treated unit's loadings from its
    // pre-treatment years.
    const int nc = static_cast<int>(controls.size());
    if (nc < 2) throw DomainError("gsc: need at least 2 control units");
    Eigen::MatrixXd Yc(nc, T);
    std::vector<Eigen::MatrixXd> Xc(X.size(), Eigen::MatrixXd(nc, T));
    for (int i = 0; i < nc; ++i) {
        Yc.row(i) = Y.row(controls[static_cast<std::size_t>(i)]);
        for (std::size_t j = 0; j < X.size(); ++j)
            Xc[j].row(i) = X[j].row(controls[static_cast<std::size_t>(i)]);
    }
    out.model = fit_masked(Yc, Xc, Eigen::MatrixXd::Ones(nc, T), rank_candidate, false, 0.0, cfg);
    for (int i = 0; i < nc; ++i)
        out.cf.row(controls[static_cast<std::size_t>(i)]) =
            out.model.fitted_row(i, Xc).transpose();

    for (int row : treated) {
        int n_pre = 0;
        for (int t = 0; t < T; ++t)
            if (years[static_cast<std::size_t>(t)] < treatment_year[static_cast<std::size_t>(row)])
                ++n_pre;
        std::vector<Eigen::VectorXd> x_row;
        for (const auto& Xj : X) x_row.push_back(Xj.row(row).transpose());
        auto [a_i, lam] = project_loadings(out.model, Y.row(row).transpose(), x_row, n_pre);
        for (int t = 0; t < T; ++t) {
            double v = a_i + out.model.xi(t);
            for (std::size_t j = 0; j < X.size(); ++j)
                v += out.model.beta(static_cast<int>(j)) * X[j](row, t);
            if (out.model.rank > 0) v += lam.dot(out.model.factors.row(t));
            out.cf(row, t) = v;
        }
    }
    return out;
}

// Per-lead ATT means from a delta matrix (Y - cf) restricted to treated rows.
std::map<int, std::pair<double, int>> lead_means(const Eigen::MatrixXd& delta,
                                                 const std::vector<int>& treated_rows,
                                                 const std::vector<int>& treatment_year,
                                                 const std::vector<int>& years) {
    std::map<int, std::pair<double, int>> acc;  // lead -> (sum, count)
    for (int row : treated_rows) {
        for (int t = 0; t < static_cast<int>(years.size()); ++t) {
            const int lead =
                years[static_cast<std::size_t>(t)] - treatment_year[static_cast<std::size_t>(row)] + 1;
            auto& [total, cnt] = acc[lead];
            total += delta(row, t);
            ++cnt;
        }
    }
    return acc;
}

double weighted_post_mean(const std::map<int, std::pair<double, int>>& acc) {
    double total = 0.0;
    int n = 0;
    for (const auto& [lead, sc] : acc) {
        if (lead < 1) continue;
        total += sc.first;
        n += sc.second;
    }
    return n > 0 ? total / n : 0.0;
}

double weighted_pre_mean(const std::map<int, std::pair<double, int>>& acc) {
    double total = 0.0;
    int n = 0;
    for (const auto& [lead, sc] : acc) {
        if (lead >= 1) continue;
        total += sc.first;
        n += sc.second;
    }
    return n > 0 ? total / n : 0.0;
}

}  // namespace

GscResult estimate_att(const StudyPanel& panel, const GscConfig& cfg) {
    GscData data = build_gsc_data(panel, cfg);
    const int T = static_cast<int>(data.years.size());
    if (data.treated_rows.empty()) throw DomainError("gsc: panel has no treated units");
    if (data.control_rows.size() < 2) throw DomainError("gsc: need at least 2 control units");

    GscResult res;
    res.n_treated = static_cast<int>(data.treated_rows.size());
    res.n_controls = static_cast<int>(data.control_rows.size());

    // Hyper-parameter: fixed or cross-validated.
    int candidate = cfg.factors;
    if (cfg.factors < 0) {
        CvResult cv = cross_validate(data, cfg);
        candidate = cv.selected;
        res.cv_mse = cv.mse;
    } else if (cfg.factors < cfg.factor_min || cfg.factors > cfg.factor_max) {
        throw DomainError("gsc: factors out of the configured range");
    }
    res.selected_factors = candidate;
    double threshold = 0.0;
    if (cfg.estimator == GscEstimator::MatrixCompletion) {
        const auto grid = mc_threshold_grid(data, cfg);
        threshold = grid[static_cast<std::size_t>(candidate - cfg.factor_min)];
    }

    CfFit fit = fit_counterfactual(data.Y, data.X, data.treatment_year, data.years, candidate,
                                   threshold, cfg);
    res.model = fit.model;

    const Eigen::MatrixXd delta = data.Y - fit.cf;
    auto acc = lead_means(delta, data.treated_rows, data.treatment_year, data.years);
    res.mean_att = weighted_post_mean(acc);
    res.pre_mean_att = weighted_pre_mean(acc);

    // Control residual vectors for the bootstrap's treated-unit noise.
    std::vector<Eigen::VectorXd> control_resid;
    for (int row : data.control_rows)
        control_resid.push_back((data.Y.row(row) - fit.cf.row(row)).transpose());

    // Bootstrap: resample control units, simulate treated outcomes under H0
    // as counterfactual + a control residual vector, refit, re-estimate.
    const int B = cfg.bootstrap_runs;
    std::map<int, std::vector<double>> boot_leads;
    std::vector<double> boot_post, boot_pre;
    const int nc = static_cast<int>(data.control_rows.size());
    const int nt = static_cast<int>(data.treated_rows.size());
    const int nrep = nc + nt;
    for (int b = 0; b < B; ++b) {
        auto rng = make_rng(cfg.seed, 20000 + static_cast<std::uint64_t>(b));
        Eigen::MatrixXd Yb(nrep, T);
        std::vector<Eigen::MatrixXd> Xb(data.X.size(), Eigen::MatrixXd(nrep, T));
        std::vector<int> ty_b(static_cast<std::size_t>(nrep), GscData::kNever);
        std::vector<int> treated_b;
        for (int i = 0; i < nc; ++i) {
            const int src = data.control_rows[uniform_index(rng, static_cast<std::size_t>(nc))];
            Yb.row(i) = data.Y.row(src);
            for (std::size_t j = 0; j < Xb.size(); ++j) Xb[j].row(i) = data.X[j].row(src);
        }
        for (int i = 0; i < nt; ++i) {
            const int src = data.treated_rows[static_cast<std::size_t>(i)];
            const int dst = nc + i;
            const auto& e = control_resid[uniform_index(rng, control_resid.size())];
            Yb.row(dst) = fit.cf.row(src) + e.transpose();
            for (std::size_t j = 0; j < Xb.size(); ++j) Xb[j].row(dst) = data.X[j].row(src);
            ty_b[static_cast<std::size_t>(dst)] = data.treatment_year[static_cast<std::size_t>(src)];
            treated_b.push_back(dst);
        }
        CfFit bf = fit_counterfactual(Yb, Xb, ty_b, data.years, candidate, threshold, cfg);
        const Eigen::MatrixXd delta_b = Yb - bf.cf;
        auto acc_b = lead_means(delta_b, treated_b, ty_b, data.years);
        for (const auto& [lead, sc] : acc_b)
            boot_leads[lead].push_back(sc.first / sc.second);
        boot_post.push_back(weighted_post_mean(acc_b));
        boot_pre.push_back(weighted_pre_mean(acc_b));
    }

    for (const auto& [lead, sc] : acc) {
        AttRow row;
        row.lead = lead;
        row.att = sc.first / sc.second;
        row.n_projects = lead >= 1 ? sc.second : 0;
        auto it = boot_leads.find(lead);
        row.se = it != boot_leads.end() ? sample_sd(it->second) : 0.0;
        row.ci_lo = row.att - 1.96 * row.se;
        row.ci_hi = row.att + 1.96 * row.se;
        row.p = two_sided_p(row.att, row.se);
        res.rows.push_back(row);
    }
    res.mean_se = sample_sd(boot_post);
    res.mean_ci_lo = res.mean_att - 1.96 * res.mean_se;
    res.mean_ci_hi = res.mean_att + 1.96 * res.mean_se;
    res.mean_p = two_sided_p(res.mean_att, res.mean_se);
    res.pre_mean_se = sample_sd(boot_pre);

    // Counterfactual / effect series per treated unit on the outcome scale.
    for (int row : data.treated_rows) {
        OutcomeSeries cf_series, eff;
        cf_series.first_year = panel.first_year();
        eff.first_year = panel.first_year();
        for (int t = 0; t < T; ++t) {
            cf_series.values.push_back(fit.cf(row, t));
            eff.values.push_back(delta(row, t));
        }
        const UnitId& id = data.ids[static_cast<std::size_t>(row)];
        res.counterfactual[id] = std::move(cf_series);
        res.effect[id] = std::move(eff);
    }
    return res;
}

}  // namespace deforsc
