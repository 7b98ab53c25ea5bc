// Panel data model: units observed annually with a deforestation outcome,
// static and time-varying covariates, and an optional treatment year. A
// StudyPanel is balanced (every unit spans the same year range) and keeps its
// units in lexicographic id order so downstream algorithms are deterministic.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace deforsc {

using UnitId = std::string;

// Contiguous annual series anchored at first_year.
struct OutcomeSeries {
    int first_year = 0;
    std::vector<double> values;

    int last_year() const { return first_year + static_cast<int>(values.size()) - 1; }
    bool covers(int year) const { return year >= first_year && year <= last_year(); }
    double at_year(int year) const;          // throws DomainError when out of range
    std::size_t index_of(int year) const;    // ditto
};

// Running sum: annual flows -> cumulative totals (same year anchoring).
OutcomeSeries to_cumulative(const OutcomeSeries& annual);
// First differences: cumulative totals -> annual flows (inverse of the above).
OutcomeSeries to_annual(const OutcomeSeries& cumulative);

struct CovariateVector {
    std::map<std::string, double> statics;             // name -> value
    std::map<std::string, OutcomeSeries> dynamics;     // name -> annual series

    bool has(const std::string& name) const {
        return statics.count(name) > 0 || dynamics.count(name) > 0;
    }
};

enum class Role {
    Project,        // treated within the panel window
    DonorCandidate, // never treated
    NotYetTreated,  // treatment_year set but after the panel's last year
};

struct Unit {
    UnitId id;
    double area_ha = 0.0;
    OutcomeSeries outcome;                 // annual deforestation, hectares
    CovariateVector covariates;
    std::optional<int> treatment_year;     // first fully treated year

    // Role within a panel ending at last_year.
    Role role(int panel_last_year) const;
    // Pre-treatment years: [first_year, treatment_year); whole span if untreated.
    int pre_period_end(int panel_last_year) const;  // exclusive year bound
    // Outcome as a share of unit area, percent per year.
    OutcomeSeries relative_outcome() const;
};

class StudyPanel {
  public:
    // Validates and sorts; throws IntegrityError/DomainError on violations.
    StudyPanel(std::vector<Unit> units, int first_year, int last_year);
    StudyPanel() = default;

    const std::vector<Unit>& units() const { return units_; }
    int first_year() const { return first_year_; }
    int last_year() const { return last_year_; }
    int n_years() const { return last_year_ - first_year_ + 1; }

    const Unit& unit(const UnitId& id) const;   // throws DomainError when absent
    const Unit* find(const UnitId& id) const;   // nullptr when absent
    std::vector<const Unit*> by_role(Role r) const;

  private:
    std::vector<Unit> units_;
    int first_year_ = 0;
    int last_year_ = -1;
};

}  // namespace deforsc
