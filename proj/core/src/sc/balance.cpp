#include "deforsc/sc/balance.hpp"

#include <map>

#include "deforsc/errors.hpp"
#include "deforsc/sc/predictors.hpp"

namespace deforsc {

namespace {

// Raw (unstandardised) predictor value, including the cum_defor@YYYY path rows.
double raw_value(const Unit& u, const std::string& name, int pre_end) {
    const std::string prefix = "cum_defor@";
    if (name.rfind(prefix, 0) == 0) {
        const int year = std::stoi(name.substr(prefix.size()));
        return to_cumulative(u.outcome).at_year(year);
    }
    return predictor_value(u, name, pre_end);
}

}  // namespace

std::vector<BalanceRow> balance_table(const ScFit& fit, const Unit& project,
                                      const std::vector<const Unit*>& donors) {
    std::map<UnitId, const Unit*> by_id;
    for (const Unit* d : donors) by_id[d->id] = d;

    std::vector<BalanceRow> rows;
    for (const auto& name : fit.predictor_names) {
        BalanceRow row;
        row.name = name;
        row.v_weight = fit.weights.covariate_weights.at(name);
        row.project = raw_value(project, name, fit.treatment_year);
        double synth = 0.0, total = 0.0;
        for (const auto& id : fit.donor_ids) {
            auto it = by_id.find(id);
            if (it == by_id.end())
                throw DomainError("balance table: donor '" + id + "' not supplied");
            const double v = raw_value(*it->second, name, fit.treatment_year);
            synth += fit.weights.donor_weights.at(id) * v;
            total += v;
        }
        row.synthetic = synth;
        row.donor_mean = total / static_cast<double>(fit.donor_ids.size());
        rows.push_back(row);
    }
    return rows;
}

}  // namespace deforsc
