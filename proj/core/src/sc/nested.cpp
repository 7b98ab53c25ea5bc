#include "deforsc/sc/nested.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "deforsc/errors.hpp"
#include "deforsc/sc/predictors.hpp"
#include "deforsc/sc/simplex_qp.hpp"
#include "deforsc/util/rng.hpp"

namespace deforsc {

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
    Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
    return e / e.sum();
}

// Minimal Nelder-Mead over R^dim with an evaluation budget. Every evaluation
// is funnelled through `eval` so the caller can keep the global best.
void nelder_mead(const Eigen::VectorXd& z0, int budget, double ftol,
                 const std::function<double(const Eigen::VectorXd&)>& eval) {
    const int dim = static_cast<int>(z0.size());
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    int used = 0;

    std::vector<Eigen::VectorXd> pts;
    std::vector<double> fv;
    pts.push_back(z0);
    fv.push_back(eval(z0));
    ++used;
    for (int i = 0; i < dim && used < budget; ++i) {
        Eigen::VectorXd zi = z0;
        zi(i) += 0.7;
        pts.push_back(zi);
        fv.push_back(eval(zi));
        ++used;
    }
    const int m = static_cast<int>(pts.size());
    if (m < 2) return;

    std::vector<int> order(static_cast<std::size_t>(m));
    auto sort_order = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return fv[static_cast<std::size_t>(a)] < fv[static_cast<std::size_t>(b)]; });
    };

    while (used < budget) {
        sort_order();
        const int best = order.front(), worst = order.back();
        const int second_worst = order[static_cast<std::size_t>(m - 2)];
        if (std::fabs(fv[static_cast<std::size_t>(worst)] - fv[static_cast<std::size_t>(best)]) <=
            ftol * (1.0 + std::fabs(fv[static_cast<std::size_t>(best)])))
            break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (int i : order)
            if (i != worst) centroid += pts[static_cast<std::size_t>(i)];
        centroid /= static_cast<double>(m - 1);

        Eigen::VectorXd xr = centroid + alpha * (centroid - pts[static_cast<std::size_t>(worst)]);
        double fr = eval(xr);
        ++used;
        if (fr < fv[static_cast<std::size_t>(best)]) {
            Eigen::VectorXd xe = centroid + gamma * (xr - centroid);
            double fe = eval(xe);
            ++used;
            if (fe < fr) {
                pts[static_cast<std::size_t>(worst)] = xe;
                fv[static_cast<std::size_t>(worst)] = fe;
            } else {
                pts[static_cast<std::size_t>(worst)] = xr;
                fv[static_cast<std::size_t>(worst)] = fr;
            }
        } else if (fr < fv[static_cast<std::size_t>(second_worst)]) {
            pts[static_cast<std::size_t>(worst)] = xr;
            fv[static_cast<std::size_t>(worst)] = fr;
        } else {
            Eigen::VectorXd xc = centroid + rho * (pts[static_cast<std::size_t>(worst)] - centroid);
            double fc = eval(xc);
            ++used;
            if (fc < fv[static_cast<std::size_t>(worst)]) {
                pts[static_cast<std::size_t>(worst)] = xc;
                fv[static_cast<std::size_t>(worst)] = fc;
            } else {
                // Shrink toward the best vertex.
                const Eigen::VectorXd xb = pts[static_cast<std::size_t>(best)];
                for (int i : order) {
                    if (i == best) continue;
                    pts[static_cast<std::size_t>(i)] =
                        xb + sigma * (pts[static_cast<std::size_t>(i)] - xb);
                    fv[static_cast<std::size_t>(i)] = eval(pts[static_cast<std::size_t>(i)]);
                    ++used;
                    if (used >= budget) break;
                }
            }
        }
    }
}

}  // namespace

ScFit solve_nested(const Unit& project, const std::vector<const Unit*>& donors,
                   const ScConfig& cfg) {
    const int panel_last = project.outcome.last_year();
    const int pre_end = project.pre_period_end(panel_last);
    const int first = project.outcome.first_year;
    const int n_pre = pre_end - first;
    if (n_pre < 2)
        throw DomainError("project '" + project.id + "': need at least 2 pre-treatment years");

    const auto covariates = resolve_covariates(cfg.covariates, project);
    PredictorMatrix pm = build_predictors(project, donors, covariates, pre_end);
    const int p = static_cast<int>(pm.names.size());
    const int n = static_cast<int>(donors.size());

    // Pre-treatment MSPE straight off the raw cumulative path rows; rows that
    // were dropped as constant contribute an exactly-zero gap.
    auto mspe_of = [&](const Eigen::VectorXd& w) {
        double ss = 0.0;
        for (int i : pm.path_rows) {
            const double gap = pm.raw_project(i) - pm.raw_donors.row(i).dot(w);
            ss += gap * gap;
        }
        return ss / static_cast<double>(n_pre);
    };

    double best_mspe = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_v, best_w;
    double best_kkt = 0.0;
    int best_qp_iters = 0;
    auto consider = [&](const Eigen::VectorXd& v) {
        auto sol = solve_simplex_qp(pm.donors, pm.project, v, cfg.qp_tol, cfg.qp_max_iterations);
        const double m = mspe_of(sol.w);
        if (m < best_mspe) {
            best_mspe = m;
            best_v = v;
            best_w = sol.w;
            best_kkt = sol.kkt_residual;
            best_qp_iters = sol.iterations;
        }
        return m;
    };

    if (n == 1) {
        Eigen::VectorXd v = Eigen::VectorXd::Constant(p, 1.0 / p);
        consider(v);
    } else {
        // Fixed candidates first (deterministic order): uniform, then the
        // cumulative-path candidate whose inner objective is exactly the
        // pre-treatment MSPE (guarantees the dominance property).
        std::vector<Eigen::VectorXd> starts;
        starts.push_back(Eigen::VectorXd::Constant(p, 1.0 / p));
        if (!pm.path_rows.empty()) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
            for (int i : pm.path_rows) v(i) = pm.row_sd(i) * pm.row_sd(i);
            const double total = v.sum();
            if (total > 0.0) {
                v /= total;
                starts.push_back(v);
            }
        }
        auto rng = make_rng(cfg.seed, 7001);
        for (int s = 0; s < cfg.outer_starts; ++s) {
            auto sw = random_simplex(rng, static_cast<std::size_t>(p));
            Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(sw.data(), p);
            starts.push_back(v);
        }

        for (const auto& v : starts) consider(v);
        for (const auto& v : starts) {
            Eigen::VectorXd z(p);
            for (int i = 0; i < p; ++i) z(i) = std::log(std::max(v(i), 1e-12));
            nelder_mead(z, cfg.outer_evaluations, cfg.outer_tol,
                        [&](const Eigen::VectorXd& zz) { return consider(softmax(zz)); });
        }
    }

    // Assemble the fit on raw (hectare) series.
    ScFit fit;
    fit.treated_id = project.id;
    fit.treatment_year = pre_end;  // == treatment year when treated
    fit.treated_cumulative = to_cumulative(project.outcome);
    fit.synthetic_cumulative.first_year = first;
    fit.synthetic_cumulative.values.assign(project.outcome.values.size(), 0.0);
    for (int j = 0; j < n; ++j) {
        const OutcomeSeries cum = to_cumulative(donors[static_cast<std::size_t>(j)]->outcome);
        for (std::size_t t = 0; t < cum.values.size(); ++t)
            fit.synthetic_cumulative.values[t] += best_w(j) * cum.values[t];
    }
    fit.gap.first_year = first;
    fit.gap.values.resize(fit.treated_cumulative.values.size());
    for (std::size_t t = 0; t < fit.gap.values.size(); ++t)
        fit.gap.values[t] = fit.treated_cumulative.values[t] - fit.synthetic_cumulative.values[t];

    double ss_pre = 0.0, ss_post = 0.0;
    int n_post = 0;
    for (int y = first; y <= panel_last; ++y) {
        const double g = fit.gap.at_year(y);
        if (y < pre_end)
            ss_pre += g * g;
        else {
            ss_post += g * g;
            ++n_post;
        }
    }
    fit.mspe_pre = ss_pre / n_pre;
    fit.mspe_post = n_post > 0 ? ss_post / n_post : 0.0;

    // Clamp/renormalise so the simplex invariants hold to well under 1e-9.
    Eigen::VectorXd w = best_w.cwiseMax(0.0);
    w /= w.sum();
    for (int j = 0; j < n; ++j) fit.weights.donor_weights[pm.donor_ids[static_cast<std::size_t>(j)]] = w(j);
    Eigen::VectorXd v = best_v.cwiseMax(0.0);
    v /= v.sum();
    for (int i = 0; i < p; ++i) fit.weights.covariate_weights[pm.names[static_cast<std::size_t>(i)]] = v(i);

    fit.predictor_names = pm.names;
    fit.dropped_predictors = pm.dropped;
    fit.donor_ids = pm.donor_ids;
    fit.qp_kkt_residual = best_kkt;
    (void)best_qp_iters;
    if (!pm.dropped.empty()) {
        std::string note = "dropped zero-variance predictors:";
        for (const auto& d : pm.dropped) note += " " + d;
        fit.notes.push_back(note);
    }
    return fit;
}

ScFit solve_nested(const Unit& project, const std::vector<Unit>& donors, const ScConfig& cfg) {
    std::vector<const Unit*> ptrs;
    ptrs.reserve(donors.size());
    for (const auto& d : donors) ptrs.push_back(&d);
    return solve_nested(project, ptrs, cfg);
}

double pre_mspe_of_weights(const Unit& project, const std::vector<const Unit*>& donors,
                           const std::map<UnitId, double>& donor_weights, int pre_end) {
    const int first = project.outcome.first_year;
    const int n_pre = pre_end - first;
    if (n_pre < 1) throw DomainError("no pre-treatment years");
    const OutcomeSeries pc = to_cumulative(project.outcome);
    std::vector<std::pair<double, OutcomeSeries>> weighted;
    for (const Unit* d : donors) {
        auto it = donor_weights.find(d->id);
        if (it != donor_weights.end()) weighted.emplace_back(it->second, to_cumulative(d->outcome));
    }
    double ss = 0.0;
    for (int y = first; y < pre_end; ++y) {
        double synth = 0.0;
        for (const auto& [w, cum] : weighted) synth += w * cum.at_year(y);
        const double gap = pc.at_year(y) - synth;
        ss += gap * gap;
    }
    return ss / n_pre;
}

}  // namespace deforsc
