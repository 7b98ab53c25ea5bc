#include "deforsc/sc/predictors.hpp"

#include <cmath>

#include "deforsc/errors.hpp"

namespace deforsc {

double predictor_value(const Unit& u, const std::string& name, int pre_end) {
    const int first = u.outcome.first_year;
    const int n_pre = pre_end - first;
    if (n_pre <= 0) throw DomainError("unit '" + u.id + "': no pre-treatment years");

    auto pre_mean = [&](const OutcomeSeries& s) {
        double total = 0.0;
        for (int y = first; y < pre_end; ++y) total += s.at_year(y);
        return total / n_pre;
    };

    if (name == "defor_annual_mean") return pre_mean(u.outcome);
    if (name == "defor_cum_mean") return pre_mean(to_cumulative(u.outcome));
    auto s = u.covariates.statics.find(name);
    if (s != u.covariates.statics.end()) return s->second;
    auto d = u.covariates.dynamics.find(name);
    if (d != u.covariates.dynamics.end()) return pre_mean(d->second);
    throw DomainError("unit '" + u.id + "': unknown covariate '" + name + "'");
}

std::vector<std::string> resolve_covariates(const std::vector<std::string>& requested,
                                            const Unit& reference) {
    if (!requested.empty()) return requested;
    std::vector<std::string> names = {"defor_annual_mean", "defor_cum_mean"};
    for (const auto& [n, _] : reference.covariates.statics) names.push_back(n);
    for (const auto& [n, _] : reference.covariates.dynamics) names.push_back(n);
    return names;  // maps iterate sorted, so the order is deterministic
}

PredictorMatrix build_predictors(const Unit& project, const std::vector<const Unit*>& donors,
                                 const std::vector<std::string>& covariates, int pre_end) {
    if (donors.empty()) throw DomainError("no donors for '" + project.id + "'");
    const int first = project.outcome.first_year;
    const int n_pre = pre_end - first;
    if (n_pre < 1) throw DomainError("project '" + project.id + "': no pre-treatment years");

    const int n = static_cast<int>(donors.size());
    const OutcomeSeries project_cum = to_cumulative(project.outcome);
    std::vector<OutcomeSeries> donor_cum;
    donor_cum.reserve(static_cast<std::size_t>(n));
    for (const Unit* d : donors) donor_cum.push_back(to_cumulative(d->outcome));

    // Raw rows: named predictors, then one cumulative path row per pre year.
    std::vector<std::string> names;
    std::vector<bool> is_path;
    std::vector<Eigen::VectorXd> rows;  // each of length n+1 (project first)
    auto add_row = [&](const std::string& name, bool path, auto&& value_of) {
        Eigen::VectorXd r(n + 1);
        r(0) = value_of(project, -1);
        for (int j = 0; j < n; ++j) r(j + 1) = value_of(*donors[static_cast<std::size_t>(j)], j);
        names.push_back(name);
        is_path.push_back(path);
        rows.push_back(std::move(r));
    };

    for (const auto& cov : covariates)
        add_row(cov, false, [&](const Unit& u, int) { return predictor_value(u, cov, pre_end); });
    for (int y = first; y < pre_end; ++y)
        add_row("cum_defor@" + std::to_string(y), true, [&](const Unit& u, int j) {
            return j < 0 ? project_cum.at_year(y) : donor_cum[static_cast<std::size_t>(j)].at_year(y);
        });

    // Standardise across all units; zero-variance rows carry no signal and are
    // dropped (callers surface the names as a fit note).
    PredictorMatrix out;
    std::vector<int> kept;
    std::vector<double> sds;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Eigen::VectorXd& r = rows[i];
        const double mean = r.mean();
        const double sd = std::sqrt((r.array() - mean).square().sum() / r.size());
        if (sd <= 0.0) {
            out.dropped.push_back(names[i]);
            continue;
        }
        kept.push_back(static_cast<int>(i));
        sds.push_back(sd);
    }
    const int p = static_cast<int>(kept.size());
    if (p == 0)
        throw DomainError("project '" + project.id +
                          "': every predictor is constant across units");

    out.project.resize(p);
    out.raw_project.resize(p);
    out.donors.resize(p, n);
    out.raw_donors.resize(p, n);
    out.row_sd.resize(p);
    for (int i = 0; i < p; ++i) {
        const Eigen::VectorXd& r = rows[static_cast<std::size_t>(kept[i])];
        out.names.push_back(names[static_cast<std::size_t>(kept[i])]);
        if (is_path[static_cast<std::size_t>(kept[i])]) out.path_rows.push_back(i);
        out.row_sd(i) = sds[static_cast<std::size_t>(i)];
        out.raw_project(i) = r(0);
        out.project(i) = r(0) / sds[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            out.raw_donors(i, j) = r(j + 1);
            out.donors(i, j) = r(j + 1) / sds[static_cast<std::size_t>(i)];
        }
    }
    for (const Unit* d : donors) out.donor_ids.push_back(d->id);
    return out;
}

}  // namespace deforsc
