#include "deforsc/match/panel_att.hpp"

#include <cmath>
#include <map>

#include "deforsc/errors.hpp"
#include "deforsc/util/rng.hpp"
#include "deforsc/util/stats.hpp"

namespace deforsc {

namespace {

struct Did {
    double ha = 0.0;
    double pct = 0.0;
};

// Change from the year before treatment to the evaluated year, treated
// minus the weighted control average, on both scales.
Did did_of_set(const StudyPanel& panel, const MatchSet& set) {
    const Unit& t = panel.unit(set.treated);
    const int base = set.treatment_year - 1;
    const int ev = set.treatment_year + set.lead - 1;
    auto change_ha = [&](const Unit& u) { return u.outcome.at_year(ev) - u.outcome.at_year(base); };
    auto change_pct = [&](const Unit& u) { return 100.0 * change_ha(u) / u.area_ha; };
    Did d;
    d.ha = change_ha(t);
    d.pct = change_pct(t);
    for (const auto& c : set.controls) {
        const Unit& cu = panel.unit(c.id);
        d.ha -= c.weight * change_ha(cu);
        d.pct -= c.weight * change_pct(cu);
    }
    return d;
}

}  // namespace

std::vector<PanelAttRow> panel_att(const StudyPanel& panel, const PanelMatchResult& matches,
                                   const PanelMatchConfig& cfg) {
    if (cfg.bootstrap_runs < 1) throw DomainError("panel ATT: bootstrap_runs must be >= 1");

    std::map<int, std::vector<Did>> by_lead;
    for (const auto& set : matches.sets) by_lead[set.lead].push_back(did_of_set(panel, set));

    std::vector<PanelAttRow> rows;
    for (const auto& [lead, dids] : by_lead) {
        const std::size_t n = dids.size();
        PanelAttRow row;
        row.lead = lead;
        row.n_treated = static_cast<int>(n);
        double sha = 0.0, spct = 0.0;
        for (const auto& d : dids) {
            sha += d.ha;
            spct += d.pct;
        }
        row.att_ha = sha / static_cast<double>(n);
        row.att_pct = spct / static_cast<double>(n);

        // Bootstrap over treated units; each replicate redraws the units
        // (with their matched sets) and re-averages.
        auto rng = make_rng(cfg.seed, 9100 + static_cast<std::uint64_t>(lead));
        std::vector<double> boot_ha(static_cast<std::size_t>(cfg.bootstrap_runs));
        std::vector<double> boot_pct(static_cast<std::size_t>(cfg.bootstrap_runs));
        for (int b = 0; b < cfg.bootstrap_runs; ++b) {
            double bha = 0.0, bpct = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const Did& d = dids[uniform_index(rng, n)];
                bha += d.ha;
                bpct += d.pct;
            }
            boot_ha[static_cast<std::size_t>(b)] = bha / static_cast<double>(n);
            boot_pct[static_cast<std::size_t>(b)] = bpct / static_cast<double>(n);
        }
        row.se_ha = sample_sd(boot_ha);
        row.se_pct = sample_sd(boot_pct);
        row.ci_lo_ha = row.att_ha - 1.96 * row.se_ha;
        row.ci_hi_ha = row.att_ha + 1.96 * row.se_ha;
        row.ci_lo_pct = row.att_pct - 1.96 * row.se_pct;
        row.ci_hi_pct = row.att_pct + 1.96 * row.se_pct;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace deforsc
