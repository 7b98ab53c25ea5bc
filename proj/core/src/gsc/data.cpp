#include "deforsc/gsc/data.hpp"

#include "deforsc/errors.hpp"

namespace deforsc {

GscData build_gsc_data(const StudyPanel& panel, const GscConfig& cfg) {
    GscData d;
    const int n = static_cast<int>(panel.units().size());
    const int T = panel.n_years();
    for (int y = panel.first_year(); y <= panel.last_year(); ++y) d.years.push_back(y);

    std::vector<std::string> cov_names = cfg.covariates;
    if (cov_names.empty())
        for (const auto& [name, _] : panel.units().front().covariates.dynamics)
            cov_names.push_back(name);
    d.covariate_names = cov_names;

    d.Y.resize(n, T);
    d.treated = Eigen::MatrixXd::Zero(n, T);
    d.X.assign(cov_names.size(), Eigen::MatrixXd(n, T));
    for (int i = 0; i < n; ++i) {
        const Unit& u = panel.units()[static_cast<std::size_t>(i)];
        d.ids.push_back(u.id);
        const OutcomeSeries outcome =
            cfg.scale == OutcomeScale::PercentPerYear ? u.relative_outcome() : u.outcome;
        for (int t = 0; t < T; ++t) d.Y(i, t) = outcome.values[static_cast<std::size_t>(t)];
        for (std::size_t k = 0; k < cov_names.size(); ++k) {
            auto it = u.covariates.dynamics.find(cov_names[k]);
            if (it == u.covariates.dynamics.end())
                throw DomainError("unit '" + u.id + "': missing dynamic covariate '" +
                                  cov_names[k] + "'");
            for (int t = 0; t < T; ++t)
                d.X[k](i, t) = it->second.values[static_cast<std::size_t>(t)];
        }
        const Role role = u.role(panel.last_year());
        d.treatment_year.push_back(u.treatment_year ? *u.treatment_year : GscData::kNever);
        if (role == Role::Project) {
            d.treated_rows.push_back(i);
            for (int t = 0; t < T; ++t)
                if (d.years[static_cast<std::size_t>(t)] >= *u.treatment_year)
                    d.treated(i, t) = 1.0;
        } else {
            d.control_rows.push_back(i);
        }
    }
    // Pure control panels are legal here (fitting/CV); ATT estimation checks
    // for treated rows itself.
    return d;
}

}  // namespace deforsc
