// In-space placebo inference: the MSPE discard rule, 95% gap bands with a
// closed-form check, the inconclusive path, and donor-order invariance.
#include <doctest.h>

#include <cmath>
#include <vector>

#include "deforsc/errors.hpp"
#include "deforsc/sc/placebo.hpp"
#include "deforsc/util/rng.hpp"
#include "support/fixtures.hpp"

using namespace deforsc;

namespace {

ScConfig fast_cfg() {
    ScConfig cfg;
    cfg.outer_starts = 1;
    cfg.outer_evaluations = 60;
    return cfg;
}

std::vector<const Unit*> ptrs(const std::vector<Unit>& units) {
    std::vector<const Unit*> out;
    for (const auto& u : units) out.push_back(&u);
    return out;
}

// Project fit stub: run_placebos only reads treatment_year, mspe_pre and gap.
ScFit make_fit(double mspe_pre, int ty, int first_year, const std::vector<double>& gap) {
    ScFit fit;
    fit.treated_id = "p";
    fit.treatment_year = ty;
    fit.mspe_pre = mspe_pre;
    fit.gap.first_year = first_year;
    fit.gap.values = gap;
    return fit;
}

// Three-donor band fixture: two exact clones and one offset donor whose
// placebo gap is delta per year, cumulatively. Panel 2001-2010, treated 2007.
struct BandFixture {
    std::vector<Unit> donors;
    Unit project;
    double delta = 0.3;
};

BandFixture band_fixture() {
    BandFixture f;
    auto rng = make_rng(61, 1);
    std::vector<double> base(10);
    for (auto& v : base) v = 1.0 + uniform01(rng);
    f.project = fixtures::make_unit("p", 2001, base, 1000.0, 2007);
    f.donors.push_back(fixtures::make_unit("a", 2001, base, 1000.0));
    f.donors.push_back(fixtures::make_unit("b", 2001, base, 1000.0));
    std::vector<double> off = base;
    for (auto& v : off) v += f.delta;
    f.donors.push_back(fixtures::make_unit("c", 2001, off, 1000.0));
    return f;
}

}  // namespace

TEST_SUITE_BEGIN("placebo");

TEST_CASE("placebo needs at least two donors") {
    BandFixture f = band_fixture();
    f.donors.resize(1);
    const ScFit fit = make_fit(1.0, 2007, 2001, std::vector<double>(10, 0.0));
    CHECK_THROWS_AS(run_placebos(fit, f.project, ptrs(f.donors), fast_cfg()), DomainError);
}

TEST_CASE("poor pre-treatment fits are discarded above the ratio") {
    BandFixture f = band_fixture();
    // First pass with an enormous yardstick keeps everything and reveals each
    // placebo's own pre-treatment MSPE.
    ScFit fit = make_fit(1e12, 2007, 2001, std::vector<double>(10, 0.0));
    const auto all = run_placebos(fit, f.project, ptrs(f.donors), fast_cfg());
    REQUIRE(all.fits.size() == 3);
    CHECK(all.n_retained == 3);
    CHECK(all.fits[0].id == "a");
    CHECK(all.fits[1].id == "b");
    CHECK(all.fits[2].id == "c");
    // The clones fit each other exactly; the offset donor cannot be matched.
    CHECK(all.fits[0].mspe_pre <= 1e-10);
    CHECK(all.fits[1].mspe_pre <= 1e-10);
    const double c_mspe = all.fits[2].mspe_pre;
    CHECK(c_mspe > 0.01);

    // Ratio just above 5x: the offset donor survives.
    fit.mspe_pre = c_mspe / 4.999;
    const auto kept = run_placebos(fit, f.project, ptrs(f.donors), fast_cfg());
    CHECK(!kept.fits[2].discarded);
    CHECK(kept.n_retained == 3);

    // Ratio just below 5x: it is dropped, the clones stay.
    fit.mspe_pre = c_mspe / 5.001;
    const auto dropped = run_placebos(fit, f.project, ptrs(f.donors), fast_cfg());
    CHECK(dropped.fits[2].discarded);
    CHECK(!dropped.fits[0].discarded);
    CHECK(!dropped.fits[1].discarded);
    CHECK(dropped.n_retained == 2);
}

TEST_CASE("bands follow the retained-gap mean and spread") {
    BandFixture f = band_fixture();
    const ScFit fit = make_fit(1e12, 2007, 2001, std::vector<double>(10, 0.0));
    const auto rep = run_placebos(fit, f.project, ptrs(f.donors), fast_cfg());
    REQUIRE(rep.years == std::vector<int>{2007, 2008, 2009, 2010});
    REQUIRE(rep.n_retained == 3);

    for (std::size_t i = 0; i < rep.years.size(); ++i) {
        // Retained gaps are {0, 0, g} with g = delta * years elapsed, so the
        // band has the closed form g/3 +- 1.96 * g / sqrt(3).
        const double g = f.delta * static_cast<double>(rep.years[i] - 2001 + 1);
        CHECK(rep.band_mean[i] == doctest::Approx(g / 3.0).epsilon(1e-6));
        CHECK(rep.band_lo[i] == doctest::Approx(g / 3.0 - 1.96 * g / std::sqrt(3.0)).epsilon(1e-6));
        CHECK(rep.band_hi[i] == doctest::Approx(g / 3.0 + 1.96 * g / std::sqrt(3.0)).epsilon(1e-6));
        CHECK(rep.project_gap[i] == doctest::Approx(0.0));
        CHECK(!rep.exceeds[i]);  // zero lies inside every band
    }
    CHECK(!rep.significant);
    CHECK(!rep.inconclusive);
}

TEST_CASE("a terminal gap outside the band flags significance") {
    BandFixture f = band_fixture();
    std::vector<double> gap(10, 0.0);
    gap[9] = 50.0;  // 2010 only
    const ScFit fit = make_fit(1e12, 2007, 2001, gap);
    const auto rep = run_placebos(fit, f.project, ptrs(f.donors), fast_cfg());
    REQUIRE(rep.exceeds.size() == 4);
    CHECK(!rep.exceeds[0]);
    CHECK(!rep.exceeds[1]);
    CHECK(!rep.exceeds[2]);
    CHECK(rep.exceeds[3]);
    CHECK(rep.significant);

    // A large gap before the terminal year does not count.
    std::vector<double> early(10, 0.0);
    early[7] = 50.0;  // 2008
    const auto rep2 =
        run_placebos(make_fit(1e12, 2007, 2001, early), f.project, ptrs(f.donors), fast_cfg());
    CHECK(rep2.exceeds[1]);
    CHECK(!rep2.exceeds[3]);
    CHECK(!rep2.significant);
}

TEST_CASE("all placebos discarded means inconclusive NaN bands") {
    // Three mutually different donors: every placebo has a strictly positive
    // MSPE, and a zero yardstick discards them all.
    std::vector<Unit> donors;
    std::vector<double> flat(10, 1.0), rising(10), wavy(10);
    for (int t = 0; t < 10; ++t) {
        rising[static_cast<std::size_t>(t)] = 0.2 * t;
        wavy[static_cast<std::size_t>(t)] = 2.0 + std::sin(1.3 * t);
    }
    donors.push_back(fixtures::make_unit("d1", 2001, flat, 1000.0));
    donors.push_back(fixtures::make_unit("d2", 2001, rising, 1000.0));
    donors.push_back(fixtures::make_unit("d3", 2001, wavy, 1000.0));
    Unit project = fixtures::make_unit("p", 2001, flat, 1000.0, 2007);

    std::vector<double> gap(10, 0.0);
    gap[9] = 99.0;
    const auto rep =
        run_placebos(make_fit(0.0, 2007, 2001, gap), project, ptrs(donors), fast_cfg());
    CHECK(rep.n_retained == 0);
    CHECK(rep.inconclusive);
    CHECK(!rep.significant);  // no band, no verdict
    for (std::size_t i = 0; i < rep.years.size(); ++i) {
        CHECK(std::isnan(rep.band_mean[i]));
        CHECK(std::isnan(rep.band_lo[i]));
        CHECK(std::isnan(rep.band_hi[i]));
        CHECK(!rep.exceeds[i]);
    }
    // The project gap column is still reported.
    CHECK(rep.project_gap.back() == doctest::Approx(99.0));
}

TEST_CASE("donor order does not change the report") {
    BandFixture f = band_fixture();
    const ScFit fit = make_fit(1e12, 2007, 2001, std::vector<double>(10, 0.0));
    auto fwd = ptrs(f.donors);
    auto rev = fwd;
    std::reverse(rev.begin(), rev.end());
    const auto a = run_placebos(fit, f.project, fwd, fast_cfg());
    const auto b = run_placebos(fit, f.project, rev, fast_cfg());
    REQUIRE(a.fits.size() == b.fits.size());
    for (std::size_t i = 0; i < a.fits.size(); ++i) {
        CHECK(a.fits[i].id == b.fits[i].id);
        CHECK(a.fits[i].mspe_pre == b.fits[i].mspe_pre);
        CHECK(a.fits[i].discarded == b.fits[i].discarded);
    }
    CHECK(a.band_lo == b.band_lo);
    CHECK(a.band_hi == b.band_hi);
    CHECK(a.significant == b.significant);
}

TEST_SUITE_END();
