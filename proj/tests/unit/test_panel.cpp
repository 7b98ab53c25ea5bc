// Panel data model: series arithmetic, unit roles, panel integrity checks,
// and the long-format CSV round trip.
#include <doctest.h>

#include <cstdio>
#include <vector>

#include "deforsc/errors.hpp"
#include "deforsc/panel.hpp"
#include "deforsc/panel_io.hpp"
#include "support/fixtures.hpp"

using namespace deforsc;
using fixtures::make_unit;

TEST_SUITE_BEGIN("panel");

TEST_CASE("to_cumulative on hand values") {
    OutcomeSeries s;
    s.first_year = 2001;
    s.values = {1.0, 2.0, 3.0};
    const OutcomeSeries c = to_cumulative(s);
    CHECK(c.values == std::vector<double>{1.0, 3.0, 6.0});
    CHECK(c.first_year == 2001);
}

TEST_CASE("to_cumulative of zeros is zeros") {
    OutcomeSeries s;
    s.first_year = 2001;
    s.values = {0.0, 0.0, 0.0};
    CHECK(to_cumulative(s).values == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("to_annual inverts to_cumulative") {
    OutcomeSeries s;
    s.first_year = 1999;
    s.values = {5.5, 0.0, 2.25};
    const OutcomeSeries back = to_annual(to_cumulative(s));
    REQUIRE(back.values.size() == s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i)
        CHECK(back.values[i] == doctest::Approx(s.values[i]).epsilon(1e-12));
}

TEST_CASE("cumulative series is monotone non-decreasing") {
    OutcomeSeries s;
    s.first_year = 2001;
    s.values = {0.5, 0.0, 3.0, 0.25, 1.0};
    const OutcomeSeries c = to_cumulative(s);
    for (std::size_t i = 1; i < c.values.size(); ++i) CHECK(c.values[i] >= c.values[i - 1]);
}

TEST_CASE("at_year and covers enforce the span") {
    OutcomeSeries s;
    s.first_year = 2001;
    s.values = {1.0, 2.0};
    CHECK(s.last_year() == 2002);
    CHECK(s.at_year(2002) == 2.0);
    CHECK(s.covers(2001));
    CHECK(!s.covers(2003));
    CHECK_THROWS_AS((void)s.at_year(2003), DomainError);
    CHECK(s.index_of(2002) == 1);
}

TEST_CASE("relative_outcome converts hectares to percent of area") {
    Unit u = make_unit("u", 2001, {10.0, 20.0}, 1000.0);
    const OutcomeSeries r = u.relative_outcome();
    CHECK(r.values[0] == doctest::Approx(1.0));
    CHECK(r.values[1] == doctest::Approx(2.0));
}

TEST_CASE("relative_outcome reproduces the published rounding example") {
    // 155.8 ha/yr on a 40,103-ha unit is 0.388 %/yr (reported as 0.4).
    Unit u = make_unit("z", 2001, {155.8}, 40103.0);
    CHECK(u.relative_outcome().values[0] == doctest::Approx(0.3885).epsilon(1e-3));
}

TEST_CASE("relative_outcome of zero series is zero") {
    Unit u = make_unit("u", 2001, {0.0, 0.0}, 500.0);
    for (double v : u.relative_outcome().values) CHECK(v == 0.0);
}

TEST_CASE("roles follow the treatment year") {
    Unit project = make_unit("p", 2001, std::vector<double>(10, 1.0), 100.0, 2006);
    Unit donor = make_unit("d", 2001, std::vector<double>(10, 1.0));
    Unit late = make_unit("l", 2001, std::vector<double>(10, 1.0), 100.0, 2030);
    CHECK(project.role(2010) == Role::Project);
    CHECK(donor.role(2010) == Role::DonorCandidate);
    CHECK(late.role(2010) == Role::NotYetTreated);
    CHECK(project.pre_period_end(2010) == 2006);
    CHECK(donor.pre_period_end(2010) == 2011);
}

TEST_CASE("panel validation rejects structural problems") {
    auto ok = [](std::vector<Unit> units) { return StudyPanel(std::move(units), 2001, 2005); };
    std::vector<double> five(5, 1.0);

    CHECK_NOTHROW(ok({make_unit("a", 2001, five), make_unit("b", 2001, five)}));

    // Duplicate ids.
    CHECK_THROWS_AS(ok({make_unit("a", 2001, five), make_unit("a", 2001, five)}),
                    IntegrityError);
    // Wrong span.
    CHECK_THROWS_AS(ok({make_unit("a", 2001, {1.0, 2.0})}), IntegrityError);
    // Negative outcome.
    CHECK_THROWS_AS(ok({make_unit("a", 2001, {1.0, -0.5, 1.0, 1.0, 1.0})}), IntegrityError);
    // Non-positive area.
    CHECK_THROWS_AS(ok({make_unit("a", 2001, five, 0.0)}), IntegrityError);
}

TEST_CASE("panel sorts units lexicographically and finds by id") {
    std::vector<double> three(5, 1.0);
    StudyPanel p({make_unit("zz", 2001, three), make_unit("aa", 2001, three),
                  make_unit("mm", 2001, three)},
                 2001, 2005);
    CHECK(p.units()[0].id == "aa");
    CHECK(p.units()[2].id == "zz");
    CHECK(p.unit("mm").id == "mm");
    CHECK(p.find("nope") == nullptr);
    CHECK_THROWS_AS((void)p.unit("nope"), DomainError);
}

TEST_CASE("panel csv round trip preserves structure") {
    Unit a = make_unit("a", 2001, {1.5, 0.0, 2.25}, 100.0, 2002);
    fixtures::add_static(a, "elev", 420.0);
    fixtures::add_dynamic(a, "precip", {0.9, 1.1, 1.0});
    Unit b = make_unit("b", 2001, {0.5, 0.5, 0.5}, 50.0);
    fixtures::add_static(b, "elev", 10.0);
    fixtures::add_dynamic(b, "precip", {1.0, 1.0, 1.2});
    StudyPanel panel({a, b}, 2001, 2003);

    const std::string text = panel_to_csv(panel);
    const StudyPanel back = parse_panel(text);
    REQUIRE(back.units().size() == 2);
    CHECK(back.unit("a").treatment_year == 2002);
    CHECK(!back.unit("b").treatment_year.has_value());
    CHECK(back.unit("a").area_ha == 100.0);
    CHECK(back.unit("a").outcome.values == a.outcome.values);
    CHECK(back.unit("a").covariates.statics.at("elev") == 420.0);
    CHECK(back.unit("b").covariates.dynamics.at("precip").values ==
          b.covariates.dynamics.at("precip").values);

    // Loading is idempotent: a second round trip emits identical bytes.
    CHECK(panel_to_csv(back) == text);
}

TEST_CASE("panel csv forces declared dynamic covariates") {
    // "pressure" is constant within each unit, so it would be classified as
    // static unless the schema pins it as dynamic.
    Unit a = make_unit("a", 2001, {1.0, 1.0});
    fixtures::add_dynamic(a, "pressure", {3.0, 3.0});
    Unit b = make_unit("b", 2001, {1.0, 1.0});
    fixtures::add_dynamic(b, "pressure", {4.0, 4.0});
    StudyPanel panel({a, b}, 2001, 2002);

    PanelSchema schema;
    const StudyPanel plain = parse_panel(panel_to_csv(panel, schema), schema);
    CHECK(plain.unit("a").covariates.statics.count("pressure") == 1);

    schema.dynamic_covariates = {"pressure"};
    const StudyPanel forced = parse_panel(panel_to_csv(panel, schema), schema);
    CHECK(forced.unit("a").covariates.dynamics.count("pressure") == 1);
}

TEST_CASE("panel csv rejects missing columns and bad cells") {
    CHECK_THROWS_AS(parse_panel("unit,year\np,2001\n"), SchemaError);
    CHECK_THROWS_AS(
        parse_panel("unit,year,deforestation_ha,area_ha,treatment_year\np,2001,x,100,\n"),
        SchemaError);
}

TEST_SUITE_END();
