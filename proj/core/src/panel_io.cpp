#include "deforsc/panel_io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "deforsc/errors.hpp"
#include "deforsc/util/csv.hpp"
#include "deforsc/util/numfmt.hpp"

namespace deforsc {

namespace {

struct RawUnit {
    std::map<int, std::size_t> year_to_row;  // year -> row index in table
    double area = 0.0;
    std::string treatment_cell;
};

}  // namespace

StudyPanel parse_panel(const std::string& csv_text, const PanelSchema& schema) {
    CsvTable t = parse_csv(csv_text);
    const std::size_t c_unit = t.col(schema.unit_col);
    const std::size_t c_year = t.col(schema.year_col);
    const std::size_t c_out = t.col(schema.outcome_col);
    const std::size_t c_area = t.col(schema.area_col);
    const std::size_t c_treat = t.col(schema.treatment_col);

    // Remaining columns are covariates, in header order.
    std::vector<std::size_t> cov_cols;
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (i != c_unit && i != c_year && i != c_out && i != c_area && i != c_treat)
            cov_cols.push_back(i);

    // Group rows by unit, checking duplicates and collecting the year span.
    std::map<UnitId, RawUnit> raw;
    int y_min = std::numeric_limits<int>::max();
    int y_max = std::numeric_limits<int>::min();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const UnitId id = row[c_unit];
        if (id.empty()) throw SchemaError("row " + std::to_string(r + 2) + ": empty unit id");
        const std::string ctx = "unit '" + id + "' row " + std::to_string(r + 2);
        const int year = static_cast<int>(parse_int(row[c_year], ctx + " year"));
        RawUnit& ru = raw[id];
        if (!ru.year_to_row.emplace(year, r).second)
            throw IntegrityError("unit '" + id + "': duplicate year " + std::to_string(year));
        const double area = parse_double(row[c_area], ctx + " area");
        if (ru.year_to_row.size() == 1) {
            ru.area = area;
            ru.treatment_cell = row[c_treat];
        } else {
            if (area != ru.area)
                throw IntegrityError("unit '" + id + "': area varies across rows");
            if (row[c_treat] != ru.treatment_cell)
                throw IntegrityError("unit '" + id + "': treatment_year varies across rows");
        }
        y_min = std::min(y_min, year);
        y_max = std::max(y_max, year);
    }
    if (raw.empty()) throw SchemaError("panel file has no data rows");

    // Balanced panel: every unit covers [y_min, y_max] with no gaps.
    for (const auto& [id, ru] : raw) {
        int expect = y_min;
        for (const auto& [year, _] : ru.year_to_row) {
            if (year != expect)
                throw IntegrityError("unit '" + id + "': missing year " +
                                     std::to_string(expect));
            ++expect;
        }
        if (expect != y_max + 1)
            throw IntegrityError("unit '" + id + "': missing year " + std::to_string(expect));
    }
    const std::size_t ny = static_cast<std::size_t>(y_max - y_min + 1);

    // Parse covariate columns per unit and classify static vs dynamic.
    const std::set<std::string> forced_dynamic(schema.dynamic_covariates.begin(),
                                               schema.dynamic_covariates.end());
    std::vector<Unit> units;
    units.reserve(raw.size());
    for (const auto& [id, ru] : raw) {
        Unit u;
        u.id = id;
        u.area_ha = ru.area;
        if (!ru.treatment_cell.empty())
            u.treatment_year = static_cast<int>(
                parse_int(ru.treatment_cell, "unit '" + id + "' treatment_year"));
        u.outcome.first_year = y_min;
        u.outcome.values.resize(ny);
        for (const auto& [year, r] : ru.year_to_row)
            u.outcome.values[static_cast<std::size_t>(year - y_min)] = parse_double(
                t.rows[r][c_out], "unit '" + id + "' year " + std::to_string(year) +
                                      " " + schema.outcome_col);
        units.push_back(std::move(u));
    }

    for (std::size_t c : cov_cols) {
        const std::string& name = t.header[c];
        // Parse every unit's series for this column first.
        std::vector<OutcomeSeries> series(units.size());
        bool any_varies = forced_dynamic.count(name) > 0;
        std::size_t ui = 0;
        for (const auto& [id, ru] : raw) {
            OutcomeSeries& s = series[ui];
            s.first_year = y_min;
            s.values.resize(ny);
            for (const auto& [year, r] : ru.year_to_row)
                s.values[static_cast<std::size_t>(year - y_min)] = parse_double(
                    t.rows[r][c],
                    "unit '" + id + "' year " + std::to_string(year) + " " + name);
            for (double v : s.values)
                if (v != s.values.front()) any_varies = true;
            ++ui;
        }
        for (std::size_t i = 0; i < units.size(); ++i) {
            if (any_varies)
                units[i].covariates.dynamics[name] = std::move(series[i]);
            else
                units[i].covariates.statics[name] = series[i].values.front();
        }
    }

    return StudyPanel(std::move(units), y_min, y_max);
}

StudyPanel load_panel(const std::string& path, const PanelSchema& schema) {
    std::ostringstream ss;
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw SchemaError("cannot open panel file: " + path);
        ss << in.rdbuf();
    }
    return parse_panel(ss.str(), schema);
}

std::string panel_to_csv(const StudyPanel& panel, const PanelSchema& schema) {
    // Covariate name order: lexicographic union across units (panel integrity
    // means all units share the same names, but the union keeps this robust).
    std::set<std::string> cov_names;
    for (const auto& u : panel.units()) {
        for (const auto& [n, _] : u.covariates.statics) cov_names.insert(n);
        for (const auto& [n, _] : u.covariates.dynamics) cov_names.insert(n);
    }

    CsvTable t;
    t.header = {schema.unit_col, schema.year_col, schema.outcome_col, schema.area_col,
                schema.treatment_col};
    for (const auto& n : cov_names) t.header.push_back(n);

    for (const auto& u : panel.units()) {
        for (int year = panel.first_year(); year <= panel.last_year(); ++year) {
            std::vector<std::string> row;
            row.reserve(t.header.size());
            row.push_back(u.id);
            row.push_back(std::to_string(year));
            row.push_back(fmt_exact(u.outcome.at_year(year)));
            row.push_back(fmt_exact(u.area_ha));
            row.push_back(u.treatment_year ? std::to_string(*u.treatment_year) : "");
            for (const auto& n : cov_names) {
                auto s = u.covariates.statics.find(n);
                if (s != u.covariates.statics.end()) {
                    row.push_back(fmt_exact(s->second));
                    continue;
                }
                auto d = u.covariates.dynamics.find(n);
                if (d != u.covariates.dynamics.end()) {
                    row.push_back(fmt_exact(d->second.at_year(year)));
                    continue;
                }
                throw IntegrityError("unit '" + u.id + "': missing covariate '" + n + "'");
            }
            t.rows.push_back(std::move(row));
        }
    }
    return to_csv(t);
}

void save_panel(const std::string& path, const StudyPanel& panel, const PanelSchema& schema) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write panel file: " + path);
    out << panel_to_csv(panel, schema);
}

}  // namespace deforsc
