#include "deforsc/panel.hpp"

#include <algorithm>
#include <cmath>

#include "deforsc/errors.hpp"

namespace deforsc {

double OutcomeSeries::at_year(int year) const {
    return values[index_of(year)];
}

std::size_t OutcomeSeries::index_of(int year) const {
    if (!covers(year))
        throw DomainError("year " + std::to_string(year) + " outside series [" +
                          std::to_string(first_year) + ", " + std::to_string(last_year()) + "]");
    return static_cast<std::size_t>(year - first_year);
}

OutcomeSeries to_cumulative(const OutcomeSeries& annual) {
    OutcomeSeries out;
    out.first_year = annual.first_year;
    out.values.reserve(annual.values.size());
    double total = 0.0;
    for (double v : annual.values) {
        total += v;
        out.values.push_back(total);
    }
    return out;
}

OutcomeSeries to_annual(const OutcomeSeries& cumulative) {
    OutcomeSeries out;
    out.first_year = cumulative.first_year;
    out.values.reserve(cumulative.values.size());
    double prev = 0.0;
    for (double v : cumulative.values) {
        out.values.push_back(v - prev);
        prev = v;
    }
    return out;
}

Role Unit::role(int panel_last_year) const {
    if (!treatment_year) return Role::DonorCandidate;
    return *treatment_year > panel_last_year ? Role::NotYetTreated : Role::Project;
}

int Unit::pre_period_end(int panel_last_year) const {
    if (!treatment_year) return panel_last_year + 1;
    return std::min(*treatment_year, panel_last_year + 1);
}

OutcomeSeries Unit::relative_outcome() const {
    if (area_ha <= 0.0) throw IntegrityError("unit '" + id + "': non-positive area");
    OutcomeSeries out = outcome;
    for (double& v : out.values) v = 100.0 * v / area_ha;
    return out;
}

StudyPanel::StudyPanel(std::vector<Unit> units, int first_year, int last_year)
    : units_(std::move(units)), first_year_(first_year), last_year_(last_year) {
    if (last_year_ < first_year_)
        throw DomainError("panel year range is empty");
    if (units_.empty())
        throw DomainError("panel has no units");

    std::sort(units_.begin(), units_.end(),
              [](const Unit& a, const Unit& b) { return a.id < b.id; });

    const std::size_t ny = static_cast<std::size_t>(n_years());
    for (std::size_t i = 0; i < units_.size(); ++i) {
        const Unit& u = units_[i];
        if (u.id.empty()) throw IntegrityError("unit with empty id");
        if (i > 0 && units_[i - 1].id == u.id)
            throw IntegrityError("duplicate unit id '" + u.id + "'");
        if (!(u.area_ha > 0.0) || !std::isfinite(u.area_ha))
            throw IntegrityError("unit '" + u.id + "': area must be positive and finite");
        if (u.outcome.first_year != first_year_ || u.outcome.values.size() != ny)
            throw IntegrityError("unit '" + u.id + "': outcome series does not span the panel (" +
                                 std::to_string(first_year_) + "-" + std::to_string(last_year_) +
                                 ")");
        for (double v : u.outcome.values) {
            if (!std::isfinite(v))
                throw IntegrityError("unit '" + u.id + "': non-finite outcome value");
            if (v < 0.0)
                throw IntegrityError("unit '" + u.id + "': negative annual deforestation");
        }
        for (const auto& [name, val] : u.covariates.statics)
            if (!std::isfinite(val))
                throw IntegrityError("unit '" + u.id + "': non-finite covariate '" + name + "'");
        for (const auto& [name, series] : u.covariates.dynamics) {
            if (series.first_year != first_year_ || series.values.size() != ny)
                throw IntegrityError("unit '" + u.id + "': dynamic covariate '" + name +
                                     "' does not span the panel");
            for (double v : series.values)
                if (!std::isfinite(v))
                    throw IntegrityError("unit '" + u.id + "': non-finite covariate '" + name +
                                         "'");
        }
        if (u.treatment_year && *u.treatment_year <= first_year_)
            throw DomainError("unit '" + u.id + "': treatment year " +
                              std::to_string(*u.treatment_year) +
                              " leaves no pre-treatment period");
    }
}

const Unit& StudyPanel::unit(const UnitId& id) const {
    const Unit* u = find(id);
    if (!u) throw DomainError("unknown unit id '" + id + "'");
    return *u;
}

const Unit* StudyPanel::find(const UnitId& id) const {
    auto it = std::lower_bound(units_.begin(), units_.end(), id,
                               [](const Unit& u, const UnitId& key) { return u.id < key; });
    if (it == units_.end() || it->id != id) return nullptr;
    return &*it;
}

std::vector<const Unit*> StudyPanel::by_role(Role r) const {
    std::vector<const Unit*> out;
    for (const auto& u : units_)
        if (u.role(last_year_) == r) out.push_back(&u);
    return out;
}

}  // namespace deforsc
