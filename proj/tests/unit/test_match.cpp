// Panel matching, matched-set DiD effects, and genetic matching.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"

#include "deforsc/errors.hpp"
#include "deforsc/match/genetic.hpp"
#include "deforsc/match/panel_att.hpp"
#include "deforsc/match/panel_match.hpp"
#include "support/fixtures.hpp"

using namespace deforsc;

namespace {

std::vector<double> constant(int n, double v) { return std::vector<double>(static_cast<std::size_t>(n), v); }

std::vector<double> shifted(const std::vector<double>& base, double c) {
    std::vector<double> v = base;
    for (double& x : v) x += c;
    return v;
}

double weight_sum(const MatchSet& set) {
    double s = 0.0;
    for (const auto& c : set.controls) s += c.weight;
    return s;
}

}  // namespace

TEST_SUITE("match") {

TEST_CASE("eligibility follows treatment timing") {
    const Unit t = make_unit("t", 2000, constant(10, 1.0), 1000, 2005);
    const Unit never = make_unit("c", 2000, constant(10, 1.0));
    const Unit later = make_unit("d", 2000, constant(10, 1.0), 1000, 2008);

    // Never-treated candidates are eligible at any lead.
    CHECK(eligible_control(t, never, 1));
    CHECK(eligible_control(t, never, 50));

    // Later-treated candidates stay eligible only while their own treatment
    // year lies beyond the evaluated year ty + lead - 1.
    CHECK(eligible_control(t, later, 1));        // evaluates 2005
    CHECK(eligible_control(t, later, 3));        // evaluates 2007
    CHECK_FALSE(eligible_control(t, later, 4));  // evaluates 2008, treated by then
    CHECK_FALSE(eligible_control(t, later, 5));

    // No self-matches, and untreated units take no controls at all.
    CHECK_FALSE(eligible_control(t, t, 1));
    CHECK_FALSE(eligible_control(never, t, 1));
}

TEST_CASE("mahalanobis ranking follows history distance") {
    // Candidate histories are the treated history plus a constant shift, so
    // every pairwise difference points along the all-ones direction and the
    // ranking must follow |shift| no matter what the covariance looks like.
    const std::vector<double> base = {8, 9, 10, 11, 12, 10, 10, 10, 10, 10, 10, 10};
    std::vector<Unit> units;
    units.push_back(make_unit("t0", 2000, base, 1000, 2006));
    units.push_back(make_unit("u1", 2000, shifted(base, 0.5)));
    units.push_back(make_unit("u2", 2000, shifted(base, -1.0)));
    units.push_back(make_unit("u3", 2000, shifted(base, 2.0)));
    units.push_back(make_unit("u4", 2000, shifted(base, -4.0)));
    units.push_back(make_unit("u5", 2000, shifted(base, -0.5)));  // ties with u1
    const StudyPanel panel(std::move(units), 2000, 2011);

    PanelMatchConfig cfg;
    cfg.max_lead = 1;
    cfg.max_controls = 3;
    const auto res = panel_match(panel, cfg);

    REQUIRE(res.sets.size() == 1);
    CHECK(res.notes.empty());
    const MatchSet& set = res.sets.front();
    CHECK(set.treated == "t0");
    CHECK(set.method == "maha");
    CHECK(set.treatment_year == 2006);
    CHECK(set.lead == 1);
    // |shift| ascending; the +0.5 / -0.5 tie resolves to candidate id order.
    REQUIRE(set.controls.size() == 3);
    CHECK(set.controls[0].id == "u1");
    CHECK(set.controls[1].id == "u5");
    CHECK(set.controls[2].id == "u2");
    for (const auto& c : set.controls) CHECK(c.weight == doctest::Approx(1.0 / 3));
    CHECK(weight_sum(set) == doctest::Approx(1.0));

    // Widening the cap keeps everyone, still ranked by |shift|.
    cfg.max_controls = 10;
    const auto all = panel_match(panel, cfg).sets.front();
    REQUIRE(all.controls.size() == 5);
    CHECK(all.controls[3].id == "u3");
    CHECK(all.controls[4].id == "u4");
    for (const auto& c : all.controls) CHECK(c.weight == doctest::Approx(0.2));
}

TEST_CASE("staggered adoption narrows the candidate pool") {
    std::vector<Unit> units;
    units.push_back(make_unit("a", 2000, constant(12, 10.0), 1000, 2006));
    units.push_back(make_unit("b", 2000, constant(12, 10.1), 1000, 2008));
    units.push_back(make_unit("c", 2000, constant(12, 10.2), 1000, 2010));
    units.push_back(make_unit("d", 2000, constant(12, 10.3)));
    units.push_back(make_unit("e", 2000, constant(12, 10.4)));
    const StudyPanel panel(std::move(units), 2000, 2011);

    PanelMatchConfig cfg;
    cfg.max_lead = 3;
    const auto res = panel_match(panel, cfg);

    // Lead-major, treated ids ascending; c's lead-3 evaluation falls in 2012.
    std::vector<std::pair<int, std::string>> got;
    for (const auto& s : res.sets) got.emplace_back(s.lead, s.treated);
    const std::vector<std::pair<int, std::string>> want = {
        {1, "a"}, {1, "b"}, {1, "c"}, {2, "a"}, {2, "b"}, {2, "c"}, {3, "a"}, {3, "b"}};
    CHECK(got == want);
    REQUIRE(res.notes.size() == 1);
    CHECK(res.notes.front() == "'c' lead 3: evaluation year outside the panel");

    // Pool sizes shrink as later adopters get treated themselves.
    const std::vector<std::size_t> pools = {4, 3, 2, 4, 3, 2, 3, 2};
    for (std::size_t i = 0; i < pools.size(); ++i)
        CHECK(res.sets[i].controls.size() == pools[i]);

    // At lead 3 unit b (treated 2008) is no longer a control for a.
    std::vector<std::string> ids;
    for (const auto& c : res.sets[6].controls) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    CHECK(ids == std::vector<std::string>{"c", "d", "e"});
    for (const auto& s : res.sets) CHECK(weight_sum(s) == doctest::Approx(1.0));
}

TEST_CASE("treated units without candidates are noted and skipped") {
    std::vector<Unit> units;
    units.push_back(make_unit("p", 2000, constant(11, 5.0), 1000, 2005));
    units.push_back(make_unit("q", 2000, constant(11, 6.0), 1000, 2005));
    const StudyPanel panel(std::move(units), 2000, 2010);

    PanelMatchConfig cfg;
    cfg.max_lead = 1;
    const auto res = panel_match(panel, cfg);
    CHECK(res.sets.empty());
    REQUIRE(res.notes.size() == 2);
    CHECK(res.notes[0] == "'p' lead 1: no eligible controls");
    CHECK(res.notes[1] == "'q' lead 1: no eligible controls");
}

TEST_CASE("an identical history wins under every refinement") {
    std::vector<Unit> units;
    Unit t = make_unit("t", 2000, constant(11, 10.0), 500, 2006);
    add_dynamic(t, "press", constant(11, 1.0));
    Unit clone = make_unit("u1", 2000, constant(11, 10.0));
    add_dynamic(clone, "press", constant(11, 1.0));
    Unit far = make_unit("u2", 2000, constant(11, 20.0));
    add_dynamic(far, "press", constant(11, 3.0));
    units.push_back(std::move(t));
    units.push_back(std::move(clone));
    units.push_back(std::move(far));
    const StudyPanel panel(std::move(units), 2000, 2010);

    PanelMatchConfig cfg;
    cfg.max_lead = 1;
    cfg.max_controls = 1;

    cfg.method = PanelMatchMethod::Mahalanobis;
    auto set = panel_match(panel, cfg).sets.front();
    CHECK(set.method == "maha");
    REQUIRE(set.controls.size() == 1);
    CHECK(set.controls.front().id == "u1");
    CHECK(set.controls.front().weight == 1.0);

    cfg.method = PanelMatchMethod::PsMatch;
    set = panel_match(panel, cfg).sets.front();
    CHECK(set.method == "ps_match");
    REQUIRE(set.controls.size() == 1);
    CHECK(set.controls.front().id == "u1");
    CHECK(set.controls.front().weight == 1.0);

    // Odds weighting keeps the whole pool but loads the lookalike.
    cfg.method = PanelMatchMethod::PsWeight;
    set = panel_match(panel, cfg).sets.front();
    CHECK(set.method == "ps_weight");
    REQUIRE(set.controls.size() == 2);
    CHECK(weight_sum(set) == doctest::Approx(1.0));
    double w1 = 0.0, w2 = 0.0;
    for (const auto& c : set.controls) (c.id == "u1" ? w1 : w2) = c.weight;
    CHECK(w1 > w2);
}

TEST_CASE("matched-set DiD reproduces a hand effect on both scales") {
    // Treated drops from 10 to 4 ha/yr at treatment; flat controls.
    std::vector<double> y = constant(11, 10.0);
    for (int i = 6; i < 11; ++i) y[static_cast<std::size_t>(i)] = 4.0;
    std::vector<Unit> units;
    units.push_back(make_unit("t", 2000, y, 500, 2006));
    units.push_back(make_unit("d1", 2000, constant(11, 10.0), 1000));
    units.push_back(make_unit("d2", 2000, constant(11, 10.0), 1000));
    const StudyPanel panel(std::move(units), 2000, 2010);

    PanelMatchConfig cfg;
    cfg.max_lead = 3;
    cfg.max_controls = 2;
    cfg.bootstrap_runs = 50;
    const auto matches = panel_match(panel, cfg);
    REQUIRE(matches.sets.size() == 3);
    const auto rows = panel_att(panel, matches, cfg);

    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        CHECK(r.lead == static_cast<int>(i) + 1);
        CHECK(r.n_treated == 1);
        CHECK(r.att_ha == -6.0);
        CHECK(r.att_pct == doctest::Approx(-1.2));
        // One treated unit: every bootstrap replicate redraws the same set.
        CHECK(r.se_ha == 0.0);
        CHECK(r.se_pct == 0.0);
        CHECK(r.ci_lo_ha == -6.0);
        CHECK(r.ci_hi_ha == -6.0);
    }
}

TEST_CASE("bootstrap spread reflects treated heterogeneity") {
    std::vector<double> y1 = constant(11, 10.0), y2 = constant(11, 10.0);
    for (int i = 6; i < 11; ++i) {
        y1[static_cast<std::size_t>(i)] = 4.0;  // effect -6 ha
        y2[static_cast<std::size_t>(i)] = 8.0;  // effect -2 ha
    }
    std::vector<Unit> units;
    units.push_back(make_unit("t1", 2000, y1, 500, 2006));
    units.push_back(make_unit("t2", 2000, y2, 1000, 2006));
    units.push_back(make_unit("d1", 2000, constant(11, 10.0), 1000));
    units.push_back(make_unit("d2", 2000, constant(11, 10.0), 1000));
    const StudyPanel panel(std::move(units), 2000, 2010);

    PanelMatchConfig cfg;
    cfg.max_lead = 2;
    cfg.max_controls = 2;
    cfg.bootstrap_runs = 200;
    cfg.seed = 11;
    const auto matches = panel_match(panel, cfg);
    const auto rows = panel_att(panel, matches, cfg);

    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.n_treated == 2);
        CHECK(r.att_ha == doctest::Approx(-4.0));
        CHECK(r.att_pct == doctest::Approx(-0.7));
        CHECK(r.se_ha > 0.0);
        CHECK(r.ci_lo_ha < r.att_ha);
        CHECK(r.ci_hi_ha > r.att_ha);
        CHECK(r.ci_hi_ha - r.att_ha == doctest::Approx(r.att_ha - r.ci_lo_ha));
    }

    // Same seed, same draws.
    const auto again = panel_att(panel, matches, cfg);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].se_ha == again[i].se_ha);
        CHECK(rows[i].se_pct == again[i].se_pct);
    }
}

TEST_CASE("panel matching validates its inputs") {
    std::vector<Unit> units;
    units.push_back(make_unit("t", 2000, constant(11, 5.0), 1000, 2006));
    units.push_back(make_unit("d", 2000, constant(11, 5.0)));
    const StudyPanel panel(std::move(units), 2000, 2010);

    PanelMatchConfig cfg;
    cfg.max_lead = 0;
    CHECK_THROWS_AS(panel_match(panel, cfg), DomainError);
    cfg.max_lead = 1;
    cfg.max_controls = 0;
    CHECK_THROWS_AS(panel_match(panel, cfg), DomainError);
    cfg.max_controls = 1;
    const auto matches = panel_match(panel, cfg);
    PanelMatchConfig no_boot = cfg;
    no_boot.bootstrap_runs = 0;
    CHECK_THROWS_AS(panel_att(panel, matches, no_boot), DomainError);

    std::vector<Unit> untreated;
    untreated.push_back(make_unit("d1", 2000, constant(11, 5.0)));
    untreated.push_back(make_unit("d2", 2000, constant(11, 5.0)));
    const StudyPanel none(std::move(untreated), 2000, 2010);
    CHECK_THROWS_AS(panel_match(none, cfg), DomainError);
}

TEST_CASE("genetic matching zeroes imbalance when clones exist") {
    Unit t = make_unit("t", 2000, constant(10, 5.0), 1000, 2006);
    add_static(t, "slope", 2.0);
    std::vector<Unit> pool_units;
    for (double s : {2.0, 2.0, 5.0, 9.0}) {
        Unit u = make_unit("p" + std::to_string(pool_units.size() + 1), 2000, constant(10, 5.0));
        add_static(u, "slope", s);
        pool_units.push_back(std::move(u));
    }
    std::vector<const Unit*> pool;
    for (const auto& u : pool_units) pool.push_back(&u);

    GeneticConfig cfg;
    cfg.n_controls = 2;
    cfg.covariates = {"slope"};
    cfg.population = 1;  // identity metric only
    cfg.elites = 0;
    cfg.generations = 0;
    const auto res = genetic_match(t, pool, cfg);

    CHECK(res.fitness == 0.0);
    CHECK(res.covariates == std::vector<std::string>{"slope"});
    REQUIRE(res.metric_weights.size() == 1);
    CHECK(res.metric_weights.front() == 1.0);
    CHECK(res.matches.method == "genetic");
    CHECK(res.matches.treatment_year == 2006);
    CHECK(res.matches.lead == 0);
    REQUIRE(res.matches.controls.size() == 2);
    CHECK(res.matches.controls[0].id == "p1");
    CHECK(res.matches.controls[1].id == "p2");
    for (const auto& c : res.matches.controls) CHECK(c.weight == 0.5);

    REQUIRE(res.balance.size() == 1);
    CHECK(res.balance.front().covariate == "slope");
    // Pool slopes {2,2,5,9}: mean 4.5, sample sd sqrt(11).
    CHECK(res.balance.front().smd_before == doctest::Approx(-2.5 / std::sqrt(11.0)));
    CHECK(res.balance.front().smd_after == doctest::Approx(0.0));

    // Matching the whole pool reproduces the before-matching imbalance.
    cfg.n_controls = 4;
    const auto whole = genetic_match(t, pool, cfg);
    CHECK(whole.fitness == doctest::Approx(2.5 / std::sqrt(11.0)));
    CHECK(whole.matches.controls.size() == 4);
}

TEST_CASE("genetic matching drops constant covariates") {
    Unit t = make_unit("t", 2000, constant(10, 5.0), 1000, 2006);
    add_static(t, "slope", 2.0);
    add_static(t, "flat", 7.0);
    std::vector<Unit> pool_units;
    for (double s : {1.0, 3.0, 4.0}) {
        Unit u = make_unit("p" + std::to_string(pool_units.size() + 1), 2000, constant(10, 5.0));
        add_static(u, "slope", s);
        add_static(u, "flat", 7.0);
        pool_units.push_back(std::move(u));
    }
    std::vector<const Unit*> pool;
    for (const auto& u : pool_units) pool.push_back(&u);

    GeneticConfig cfg;
    cfg.n_controls = 1;
    cfg.covariates = {"slope", "flat"};
    cfg.population = 1;
    cfg.elites = 0;
    cfg.generations = 0;
    const auto res = genetic_match(t, pool, cfg);
    CHECK(res.covariates == std::vector<std::string>{"slope"});
    CHECK(res.metric_weights.size() == 1);
    CHECK(res.balance.size() == 1);

    cfg.covariates = {"flat"};
    CHECK_THROWS_AS(genetic_match(t, pool, cfg), DomainError);

    cfg.covariates = {"slope"};
    cfg.n_controls = 4;  // pool only has 3
    CHECK_THROWS_AS(genetic_match(t, pool, cfg), DomainError);
}

TEST_CASE("the search never does worse than the identity metric") {
    Unit t = make_unit("t", 2000, constant(10, 5.0), 1000, 2006);
    add_static(t, "a", 1.1);
    add_static(t, "b", 1.45);
    std::vector<Unit> pool_units;
    for (int i = 0; i < 12; ++i) {
        char id[8];
        std::snprintf(id, sizeof(id), "u%02d", i);
        Unit u = make_unit(id, 2000, constant(10, 5.0));
        add_static(u, "a", 0.2 * i);
        add_static(u, "b", std::fmod(1.3 * i, 3.0));
        pool_units.push_back(std::move(u));
    }
    std::vector<const Unit*> pool;
    for (const auto& u : pool_units) pool.push_back(&u);

    GeneticConfig base;
    base.n_controls = 4;
    base.covariates = {"a", "b"};
    base.seed = 7;

    GeneticConfig id_cfg = base;
    id_cfg.population = 1;
    id_cfg.elites = 0;
    id_cfg.generations = 0;
    const auto identity = genetic_match(t, pool, id_cfg);
    REQUIRE(identity.best_by_generation.size() == 1);
    CHECK(identity.best_by_generation.front() == identity.fitness);

    GeneticConfig ga_cfg = base;
    ga_cfg.population = 24;
    ga_cfg.generations = 12;
    ga_cfg.elites = 2;
    ga_cfg.mutation_sd = 0.3;
    const auto ga = genetic_match(t, pool, ga_cfg);

    CHECK(ga.fitness <= identity.fitness + 1e-12);
    REQUIRE(ga.best_by_generation.size() == 13);
    CHECK(ga.best_by_generation.front() <= identity.fitness + 1e-12);
    CHECK(ga.best_by_generation.back() == ga.fitness);
    for (std::size_t i = 1; i < ga.best_by_generation.size(); ++i)
        CHECK(ga.best_by_generation[i] <= ga.best_by_generation[i - 1]);

    // Matched set invariants: k distinct pool ids, ascending, equal weights.
    REQUIRE(ga.matches.controls.size() == 4);
    for (std::size_t i = 1; i < ga.matches.controls.size(); ++i)
        CHECK(ga.matches.controls[i - 1].id < ga.matches.controls[i].id);
    for (const auto& c : ga.matches.controls) CHECK(c.weight == doctest::Approx(0.25));

    // Seeded search is reproducible.
    const auto again = genetic_match(t, pool, ga_cfg);
    CHECK(again.fitness == ga.fitness);
    CHECK(again.metric_weights == ga.metric_weights);
    CHECK(again.best_by_generation == ga.best_by_generation);
    REQUIRE(again.matches.controls.size() == ga.matches.controls.size());
    for (std::size_t i = 0; i < ga.matches.controls.size(); ++i)
        CHECK(again.matches.controls[i].id == ga.matches.controls[i].id);
}

}  // TEST_SUITE
