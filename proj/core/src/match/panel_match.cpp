#include "deforsc/match/panel_match.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "deforsc/errors.hpp"

namespace deforsc {

namespace {

// Stacked per-year history over [ty - window, ty - 1] (clipped at the panel
// start): outcome first, then each requested dynamic covariate.
std::vector<double> history_features(const Unit& u, int ty, int window,
                                     const std::vector<std::string>& covs) {
    const int first = u.outcome.first_year;
    const int lo = std::max(first, ty - window);
    std::vector<double> f;
    for (int y = lo; y < ty; ++y) f.push_back(u.outcome.at_year(y));
    for (const auto& name : covs) {
        const auto& s = u.covariates.dynamics.at(name);
        for (int y = lo; y < ty; ++y) f.push_back(s.at_year(y));
    }
    return f;
}

// Window means: outcome mean then one mean per covariate.
std::vector<double> window_means(const Unit& u, int ty, int window,
                                 const std::vector<std::string>& covs) {
    const int first = u.outcome.first_year;
    const int lo = std::max(first, ty - window);
    const double n = ty - lo;
    std::vector<double> f;
    double s = 0.0;
    for (int y = lo; y < ty; ++y) s += u.outcome.at_year(y);
    f.push_back(s / n);
    for (const auto& name : covs) {
        const auto& series = u.covariates.dynamics.at(name);
        s = 0.0;
        for (int y = lo; y < ty; ++y) s += series.at_year(y);
        f.push_back(s / n);
    }
    return f;
}

// Ridge-regularised logistic regression via IRLS; returns fitted
// probabilities for the design rows. Rows are [1, features...].
std::vector<double> logit_fit(const std::vector<std::vector<double>>& rows,
                              const std::vector<int>& labels, double ridge) {
    const int nr = static_cast<int>(rows.size());
    const int p = static_cast<int>(rows.front().size());
    Eigen::MatrixXd X(nr, p);
    Eigen::VectorXd y(nr);
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < p; ++j) X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        y(i) = labels[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd eta = X * beta;
        Eigen::VectorXd mu(nr), w(nr);
        for (int i = 0; i < nr; ++i) {
            const double e = 1.0 / (1.0 + std::exp(-eta(i)));
            mu(i) = e;
            w(i) = std::max(e * (1.0 - e), 1e-10);
        }
        Eigen::MatrixXd H = X.transpose() * w.asDiagonal() * X;
        H.diagonal().array() += ridge;
        Eigen::VectorXd g = X.transpose() * (y - mu) - ridge * beta;
        Eigen::VectorXd step = H.ldlt().solve(g);
        beta += step;
        if (step.cwiseAbs().maxCoeff() < 1e-10) break;
    }
    Eigen::VectorXd eta = X * beta;
    std::vector<double> ps(static_cast<std::size_t>(nr));
    for (int i = 0; i < nr; ++i)
        ps[static_cast<std::size_t>(i)] =
            std::clamp(1.0 / (1.0 + std::exp(-eta(i))), 1e-9, 1.0 - 1e-9);
    return ps;
}

}  // namespace

bool eligible_control(const Unit& treated, const Unit& candidate, int lead) {
    if (!treated.treatment_year) return false;
    if (candidate.id == treated.id) return false;
    const int evaluated_year = *treated.treatment_year + lead - 1;
    if (!candidate.treatment_year) return true;  // never treated
    return *candidate.treatment_year > evaluated_year;
}

PanelMatchResult panel_match(const StudyPanel& panel, const PanelMatchConfig& cfg) {
    if (cfg.max_lead < 1) throw DomainError("panel match: max_lead must be >= 1");
    if (cfg.max_controls < 1) throw DomainError("panel match: max_controls must be >= 1");

    std::vector<std::string> covs = cfg.covariates;
    if (covs.empty())
        for (const auto& [name, _] : panel.units().front().covariates.dynamics)
            covs.push_back(name);

    // Treated = anything with a treatment year inside the panel window.
    std::vector<const Unit*> treated_units;
    for (const auto& u : panel.units())
        if (u.role(panel.last_year()) == Role::Project) treated_units.push_back(&u);
    if (treated_units.empty()) throw DomainError("panel match: no treated units");

    const char* method_name = cfg.method == PanelMatchMethod::Mahalanobis ? "maha"
                              : cfg.method == PanelMatchMethod::PsMatch   ? "ps_match"
                                                                          : "ps_weight";

    PanelMatchResult res;
    for (int lead = 1; lead <= cfg.max_lead; ++lead) {
        for (const Unit* tu : treated_units) {
            const int ty = *tu->treatment_year;
            if (ty + lead - 1 > panel.last_year()) {
                res.notes.push_back("'" + tu->id + "' lead " + std::to_string(lead) +
                                    ": evaluation year outside the panel");
                continue;
            }
            std::vector<const Unit*> cands;
            for (const auto& u : panel.units())
                if (eligible_control(*tu, u, lead)) cands.push_back(&u);
            if (cands.empty()) {
                res.notes.push_back("'" + tu->id + "' lead " + std::to_string(lead) +
                                    ": no eligible controls");
                continue;
            }

            MatchSet set;
            set.treated = tu->id;
            set.method = method_name;
            set.treatment_year = ty;
            set.lead = lead;

            if (cfg.method == PanelMatchMethod::Mahalanobis) {
                const auto ft = history_features(*tu, ty, cfg.history_window, covs);
                const int m = static_cast<int>(ft.size());
                Eigen::MatrixXd F(static_cast<int>(cands.size()) + 1, m);
                for (int j = 0; j < m; ++j) F(0, j) = ft[static_cast<std::size_t>(j)];
                for (std::size_t i = 0; i < cands.size(); ++i) {
                    const auto fc = history_features(*cands[i], ty, cfg.history_window, covs);
                    for (int j = 0; j < m; ++j) F(static_cast<int>(i) + 1, j) = fc[static_cast<std::size_t>(j)];
                }
                Eigen::RowVectorXd mu = F.colwise().mean();
                Eigen::MatrixXd C = F.rowwise() - mu;
                Eigen::MatrixXd S = (C.transpose() * C) / std::max<double>(1.0, F.rows() - 1.0);
                S.diagonal().array() += cfg.ridge * (S.trace() / m + 1.0);
                Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
                std::vector<std::pair<double, std::size_t>> dist;
                for (std::size_t i = 0; i < cands.size(); ++i) {
                    Eigen::VectorXd d = (F.row(static_cast<int>(i) + 1) - F.row(0)).transpose();
                    dist.emplace_back(d.dot(ldlt.solve(d)), i);
                }
                std::stable_sort(dist.begin(), dist.end(),
                                 [](const auto& a, const auto& b) { return a.first < b.first; });
                const int kk = std::min<int>(cfg.max_controls, static_cast<int>(dist.size()));
                for (int i = 0; i < kk; ++i)
                    set.controls.push_back({cands[dist[static_cast<std::size_t>(i)].second]->id, 1.0 / kk});
            } else {
                // Propensity model on window-averaged features.
                std::vector<std::vector<double>> rows;
                std::vector<int> labels;
                auto add_row = [&](const Unit& u, int label) {
                    std::vector<double> r = {1.0};
                    for (double v : window_means(u, ty, cfg.history_window, covs)) r.push_back(v);
                    rows.push_back(std::move(r));
                    labels.push_back(label);
                };
                add_row(*tu, 1);
                for (const Unit* c : cands) add_row(*c, 0);
                const auto ps = logit_fit(rows, labels, cfg.ridge);
                if (cfg.method == PanelMatchMethod::PsMatch) {
                    std::vector<std::pair<double, std::size_t>> dist;
                    for (std::size_t i = 0; i < cands.size(); ++i)
                        dist.emplace_back(std::fabs(ps[i + 1] - ps[0]), i);
                    std::stable_sort(dist.begin(), dist.end(),
                                     [](const auto& a, const auto& b) { return a.first < b.first; });
                    const int kk = std::min<int>(cfg.max_controls, static_cast<int>(dist.size()));
                    for (int i = 0; i < kk; ++i)
                        set.controls.push_back({cands[dist[static_cast<std::size_t>(i)].second]->id, 1.0 / kk});
                } else {
                    double total = 0.0;
                    std::vector<double> odds(cands.size());
                    for (std::size_t i = 0; i < cands.size(); ++i) {
                        odds[i] = ps[i + 1] / (1.0 - ps[i + 1]);
                        total += odds[i];
                    }
                    for (std::size_t i = 0; i < cands.size(); ++i)
                        set.controls.push_back({cands[i]->id, odds[i] / total});
                }
            }
            res.sets.push_back(std::move(set));
        }
    }
    return res;
}

}  // namespace deforsc
