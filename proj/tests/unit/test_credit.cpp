// Offset crediting arithmetic, the significance gate, and ledger plumbing.
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"

#include "deforsc/credit/credit.hpp"
#include "deforsc/errors.hpp"
#include "deforsc/util/csv.hpp"

using namespace deforsc;

namespace {

CreditInputs sample() {
    CreditInputs in;
    in.country = "Atlantis";
    in.project = "ax1";
    in.observed_defor = 100.0;
    in.baseline_defor = 200.0;
    in.sc_defor = 160.0;
    in.exante_credits = 50000.0;
    in.significant = true;
    return in;
}

}  // namespace

TEST_SUITE("credit") {

TEST_CASE("rates and offsets follow the hand arithmetic") {
    const CreditInputs in = sample();
    CHECK(per_ha_rate(in) == 250.0);                 // 50000 / 200
    CHECK(proportional_offsets(in) == 40000.0);      // 50000 * 160/200
    const auto [avoided, offsets] = sc_offsets(in);
    CHECK(avoided == 60.0);                          // max(0, 160 - 100)
    CHECK(offsets == 15000.0);                       // 60 * 250

    const CreditRow row = credit_row(in);
    CHECK(row.per_ha_rate == 250.0);
    CHECK(row.proportional_offsets == 40000.0);
    CHECK(row.avoided_ha == 60.0);
    CHECK(row.sc_offsets == 15000.0);
    CHECK(row.avoided_ha_raw == 60.0);
    CHECK(row.sc_offsets_raw == 15000.0);
    CHECK_FALSE(row.gate_conflict);
}

TEST_CASE("the significance gate zeroes credits but keeps raw columns") {
    CreditInputs in = sample();
    in.significant = false;
    const CreditRow row = credit_row(in);
    CHECK(row.avoided_ha == 0.0);
    CHECK(row.sc_offsets == 0.0);
    CHECK(row.avoided_ha_raw == 60.0);
    CHECK(row.sc_offsets_raw == 15000.0);
    CHECK(row.gate_conflict);  // the gate discarded a positive raw value
    // Rate and proportional offsets ignore the verdict.
    CHECK(row.per_ha_rate == 250.0);
    CHECK(row.proportional_offsets == 40000.0);
}

TEST_CASE("the clamp floors avoided hectares at zero") {
    CreditInputs in = sample();
    in.sc_defor = 90.0;  // synthetic cleared less than observed
    const CreditRow sig = credit_row(in);
    CHECK(sig.avoided_ha == 0.0);
    CHECK(sig.sc_offsets == 0.0);
    CHECK(sig.avoided_ha_raw == 0.0);
    CHECK_FALSE(sig.gate_conflict);

    in.significant = false;  // nothing raw to discard, so no conflict either
    const CreditRow gated = credit_row(in);
    CHECK(gated.avoided_ha_raw == 0.0);
    CHECK_FALSE(gated.gate_conflict);
}

TEST_CASE("credits scale linearly with the ex-ante volume") {
    CreditInputs in = sample();
    CreditInputs doubled = in;
    doubled.exante_credits *= 2.0;
    CHECK(per_ha_rate(doubled) == 2.0 * per_ha_rate(in));
    CHECK(proportional_offsets(doubled) == 2.0 * proportional_offsets(in));
    CHECK(sc_offsets(doubled).second == 2.0 * sc_offsets(in).second);
    CHECK(sc_offsets(doubled).first == sc_offsets(in).first);
}

TEST_CASE("offsets never exceed ex-ante credits below the baseline") {
    // avoided <= sc <= baseline, so avoided * rate <= exante.
    for (double sc : {0.0, 10.0, 150.0, 200.0})
        for (double obs : {0.0, 50.0, 120.0, 300.0}) {
            CreditInputs in = sample();
            in.sc_defor = sc;
            in.observed_defor = obs;
            CHECK(sc_offsets(in).second <= in.exante_credits * (1.0 + 1e-12));
        }
}

TEST_CASE("inputs are validated") {
    CHECK_THROWS_AS(per_ha_rate([] { auto i = sample(); i.baseline_defor = 0.0; return i; }()),
                    DomainError);
    CHECK_THROWS_AS(per_ha_rate([] { auto i = sample(); i.baseline_defor = -5.0; return i; }()),
                    DomainError);
    CHECK_THROWS_AS(
        per_ha_rate([] {
            auto i = sample();
            i.baseline_defor = std::numeric_limits<double>::quiet_NaN();
            return i;
        }()),
        DomainError);
    CHECK_THROWS_AS(credit_row([] { auto i = sample(); i.observed_defor = -1.0; return i; }()),
                    DomainError);
    CHECK_THROWS_AS(credit_row([] { auto i = sample(); i.sc_defor = -1.0; return i; }()),
                    DomainError);
    CHECK_THROWS_AS(credit_row([] { auto i = sample(); i.exante_credits = -1.0; return i; }()),
                    DomainError);
    CHECK_THROWS_AS(credit_row([] { auto i = sample(); i.project.clear(); return i; }()),
                    DomainError);
}

TEST_CASE("the ledger sorts rows and totals every column") {
    CreditInputs b = sample();
    b.project = "b";
    CreditInputs a = sample();
    a.project = "a";
    a.sc_defor = 90.0;       // clamp: contributes nothing avoided
    a.significant = false;
    CreditInputs c = sample();
    c.project = "c";
    c.exante_credits = 10000.0;
    c.significant = false;   // gate conflict: raw avoided 60 discarded

    const CreditLedger ledger = aggregate_ledger({b, a, c});
    REQUIRE(ledger.rows.size() == 3);
    CHECK(ledger.rows[0].in.project == "a");
    CHECK(ledger.rows[1].in.project == "b");
    CHECK(ledger.rows[2].in.project == "c");

    CHECK(ledger.total_exante == 110000.0);           // 50000 + 50000 + 10000
    CHECK(ledger.total_avoided_ha == 60.0);           // only b passes the gate
    CHECK(ledger.total_sc_offsets == 15000.0);
    CHECK(ledger.total_avoided_ha_raw == 120.0);      // b and c
    CHECK(ledger.total_sc_offsets_raw == 18000.0);    // 15000 + 60 * 50
    // 50000*0.45 + 50000*0.8 + 10000*0.8
    CHECK(ledger.total_proportional == doctest::Approx(70500.0));
    // a and c are not significant: (50000 + 10000) / 110000.
    CHECK(ledger.nonsignificant_exante_share == doctest::Approx(60000.0 / 110000.0));
    CHECK(ledger.rows[2].gate_conflict);
    CHECK_FALSE(ledger.rows[0].gate_conflict);

    // Input order is irrelevant: totals and rows match exactly.
    const CreditLedger swapped = aggregate_ledger({c, b, a});
    CHECK(swapped.total_exante == ledger.total_exante);
    CHECK(swapped.total_proportional == ledger.total_proportional);
    CHECK(swapped.total_sc_offsets == ledger.total_sc_offsets);
    CHECK(swapped.total_sc_offsets_raw == ledger.total_sc_offsets_raw);
    CHECK(swapped.nonsignificant_exante_share == ledger.nonsignificant_exante_share);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(swapped.rows[i].in.project == ledger.rows[i].in.project);

    CHECK_THROWS_AS(aggregate_ledger({}), DomainError);
    CHECK_THROWS_AS(aggregate_ledger({a, a}), DomainError);
}

TEST_CASE("credit inputs parse from csv") {
    const std::string text =
        "country,project,observed_ha,baseline_ha,sc_ha,exante_offsets,significant,horizon_year\n"
        "Peru,p1,403,1268,702,356960,yes,2021\n"
        "Peru,p2,878,13299,873,5891253,FALSE,\n"
        "Peru,p3,1,2,3,4,1,2019\n";
    const auto inputs = parse_credit_inputs(parse_csv(text));
    REQUIRE(inputs.size() == 3);
    CHECK(inputs[0].country == "Peru");
    CHECK(inputs[0].project == "p1");
    CHECK(inputs[0].observed_defor == 403.0);
    CHECK(inputs[0].baseline_defor == 1268.0);
    CHECK(inputs[0].sc_defor == 702.0);
    CHECK(inputs[0].exante_credits == 356960.0);
    CHECK(inputs[0].significant);
    CHECK(inputs[0].horizon_year == 2021);
    CHECK_FALSE(inputs[1].significant);     // case-insensitive flags
    CHECK(inputs[1].horizon_year == 2020);  // blank cell keeps the default
    CHECK(inputs[2].significant);           // numeric flags
    CHECK(inputs[2].horizon_year == 2019);

    // The horizon column is optional entirely.
    const std::string bare =
        "country,project,observed_ha,baseline_ha,sc_ha,exante_offsets,significant\n"
        "Peru,p1,1,2,3,4,no\n";
    CHECK(parse_credit_inputs(parse_csv(bare)).front().horizon_year == 2020);

    const std::string bad =
        "country,project,observed_ha,baseline_ha,sc_ha,exante_offsets,significant\n"
        "Peru,p1,1,2,3,4,maybe\n";
    CHECK_THROWS_AS(parse_credit_inputs(parse_csv(bad)), SchemaError);
}

TEST_CASE("the emitted ledger echoes inputs and appends a total row") {
    CreditInputs one = sample();
    one.project = "p1";
    CreditInputs two = sample();
    two.project = "p2";
    two.significant = false;
    const CreditLedger ledger = aggregate_ledger({one, two});
    const CsvTable t = ledger_to_csv(ledger);

    const std::vector<std::string> header = {
        "country",        "project",           "observed_ha", "baseline_ha",
        "sc_ha",          "exante_offsets",    "significant", "per_ha_rate",
        "proportional_offsets", "avoided_ha",  "sc_offsets",  "avoided_ha_raw",
        "sc_offsets_raw", "gate_conflict"};
    CHECK(t.header == header);
    REQUIRE(t.rows.size() == 3);  // two projects + TOTAL

    CHECK(t.rows[0][t.col("project")] == "p1");
    CHECK(t.rows[0][t.col("observed_ha")] == "100");
    CHECK(t.rows[0][t.col("significant")] == "yes");
    CHECK(t.rows[0][t.col("per_ha_rate")] == "250");
    CHECK(t.rows[0][t.col("sc_offsets")] == "15000");
    CHECK(t.rows[0][t.col("gate_conflict")] == "no");
    CHECK(t.rows[1][t.col("significant")] == "no");
    CHECK(t.rows[1][t.col("sc_offsets")] == "0");
    CHECK(t.rows[1][t.col("gate_conflict")] == "yes");

    const auto& total = t.rows[2];
    CHECK(total[0] == "TOTAL");
    CHECK(total[t.col("exante_offsets")] == "100000");
    CHECK(total[t.col("sc_offsets")] == "15000");
    CHECK(total[t.col("sc_offsets_raw")] == "30000");
    CHECK(total[t.col("significant")].empty());
    CHECK(total[t.col("gate_conflict")].empty());

    // Serialized text parses back to the same cells.
    const CsvTable back = parse_csv(to_csv(t));
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
}

}  // TEST_SUITE
