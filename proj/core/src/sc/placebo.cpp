#include "deforsc/sc/placebo.hpp"

#include <algorithm>
#include <cmath>

#include "deforsc/errors.hpp"
#include "deforsc/sc/nested.hpp"
#include "deforsc/util/stats.hpp"

namespace deforsc {

PlaceboReport run_placebos(const ScFit& project_fit, const Unit& project,
                           const std::vector<const Unit*>& donors, const ScConfig& cfg) {
    if (donors.size() < 2)
        throw DomainError("placebo inference needs at least 2 donors, got " +
                          std::to_string(donors.size()));
    const int ty = project_fit.treatment_year;
    const int panel_last = project.outcome.last_year();

    // Deterministic placebo order regardless of caller ordering.
    std::vector<const Unit*> ordered = donors;
    std::sort(ordered.begin(), ordered.end(),
              [](const Unit* a, const Unit* b) { return a->id < b->id; });

    PlaceboReport rep;
    for (const Unit* d : ordered) {
        Unit pseudo = *d;
        pseudo.treatment_year = ty;
        std::vector<const Unit*> pool;
        for (const Unit* other : ordered)
            if (other != d) pool.push_back(other);
        ScFit fit = solve_nested(pseudo, pool, cfg);

        PlaceboFit pf;
        pf.id = d->id;
        pf.mspe_pre = fit.mspe_pre;
        pf.gap = fit.gap;
        pf.discarded = fit.mspe_pre > cfg.mspe_discard_ratio * project_fit.mspe_pre;
        if (!pf.discarded) ++rep.n_retained;
        rep.fits.push_back(std::move(pf));
    }

    rep.inconclusive = rep.n_retained == 0;
    for (int y = ty; y <= panel_last; ++y) {
        rep.years.push_back(y);
        std::vector<double> gaps;
        for (const auto& pf : rep.fits)
            if (!pf.discarded) gaps.push_back(pf.gap.at_year(y));
        const double m = mean(gaps);
        const double sd = sample_sd(gaps);
        const double g = project_fit.gap.at_year(y);
        if (rep.inconclusive) {
            rep.band_mean.push_back(std::nan(""));
            rep.band_lo.push_back(std::nan(""));
            rep.band_hi.push_back(std::nan(""));
            rep.project_gap.push_back(g);
            rep.exceeds.push_back(false);
            continue;
        }
        rep.band_mean.push_back(m);
        rep.band_lo.push_back(m - 1.96 * sd);
        rep.band_hi.push_back(m + 1.96 * sd);
        rep.project_gap.push_back(g);
        rep.exceeds.push_back(g < rep.band_lo.back() || g > rep.band_hi.back());
    }
    rep.significant = !rep.inconclusive && !rep.exceeds.empty() && rep.exceeds.back();
    return rep;
}

}  // namespace deforsc
