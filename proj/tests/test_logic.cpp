#include <doctest.h>

#include "cst/logic.hpp"
#include "logic_equivalence.hpp"

using namespace cst;

TEST_CASE("receiver startup truth table") {
    for (int m = 0; m < 16; ++m) {
        const bool y = m & 1, z1 = m & 2, z2p = m & 4, drp = m & 8;
        CHECK(logic::receiver_startup(y, z1, z2p, drp) == (y && !z1 && !z2p && !drp));
    }
}

TEST_CASE("receiver generation truth table") {
    CHECK(logic::receiver_generation(true, true, false, false));
    CHECK(logic::receiver_generation(true, false, true, false));
    CHECK_FALSE(logic::receiver_generation(true, false, false, false));
    CHECK_FALSE(logic::receiver_generation(true, true, false, true));
    CHECK_FALSE(logic::receiver_generation(false, true, true, false));
}

TEST_CASE("power-block startup truth table") {
    CHECK(logic::pb_startup(true, false, false, false));
    CHECK_FALSE(logic::pb_startup(true, true, false, false));
    CHECK_FALSE(logic::pb_startup(true, false, true, false));
    CHECK_FALSE(logic::pb_startup(true, false, false, true));
    CHECK_FALSE(logic::pb_startup(false, false, false, false));
}

TEST_CASE("receiver charge branches") {
    CHECK(logic::receiver_charge(100.0, 400.0, 175.0) == 0.0);
    CHECK(logic::receiver_charge(300.0, 400.0, 175.0) == 300.0);
    CHECK(logic::receiver_charge(500.0, 400.0, 175.0) == 400.0);
    CHECK(logic::receiver_charge(175.0, 400.0, 175.0) == 175.0);
    CHECK(logic::receiver_charge(400.0, 400.0, 175.0) == 400.0);
}

TEST_CASE("potential power is moved out of the epsilon gaps") {
    const PlantDesign d;
    const double eps = 1e-3;
    CHECK(logic::condition_potential_power(175.0 - 0.5 * eps, d, eps) == doctest::Approx(175.0 - eps));
    CHECK(logic::condition_potential_power(175.0, d, eps) == 175.0);
    CHECK(logic::condition_potential_power(350.0 - 1e-4, d, eps) == doctest::Approx(350.0 - eps));
    CHECK(logic::condition_potential_power(175.0 + 43.75 - 1e-4, d, eps) == doctest::Approx(218.75 - eps));
    CHECK(logic::condition_potential_power(100.0, d, eps) == 100.0);
    CHECK(logic::condition_potential_power(0.0, d, eps) == 0.0);
}

TEST_CASE("switch rows decide below and reached thresholds") {
    const double eps = 1e-3;
    for (double x : {0.0, 100.0, 174.999, 175.0, 175.5, 600.0}) {
        MilpModel m("sw");
        const auto z = m.add_binary("z");
        logic::BigMLog log;
        logic::add_switch_below(m, "b", z, LinExpr(x) - 175.0, eps, &log);
        CHECK(log.size() == 2);
        const auto r = cst::testing::pinned_range(m, z);
        CHECK(cst::testing::pinned_to(r, x < 175.0 ? 1.0 : 0.0));
    }
    for (double e : {0.0, 87.5, 174.999, 175.0}) {
        MilpModel m("sw");
        const auto z = m.add_binary("z");
        logic::add_switch_reached(m, "r", z, LinExpr(e) - 175.0, eps, nullptr);
        CHECK(cst::testing::pinned_to(cst::testing::pinned_range(m, z), e >= 175.0 ? 1.0 : 0.0));
    }
    // inside the gap neither value is feasible
    MilpModel gap("gap");
    const auto z = gap.add_binary("z");
    logic::add_switch_below(gap, "b", z, LinExpr(175.0 - 0.5 * eps) - 175.0, eps, nullptr);
    CHECK(std::isnan(cst::testing::pinned_range(gap, z).first));
}

TEST_CASE("switch M covers the guarded expression") {
    MilpModel m("m");
    const auto x = m.add_continuous("x", 0.0, 700.0);
    const auto z = m.add_binary("z");
    logic::BigMLog log;
    logic::add_switch_below(m, "b", z, LinExpr(x) - 175.0, 1e-3, &log);
    for (const auto& r : log) CHECK(r.m > m.max_abs(r.guarded));
    // |x - 175| peaks at x = 700
    CHECK(log[0].m == doctest::Approx(525.0 * 1.05));
}

TEST_CASE("rows agree with the case functions on random inputs") {
    Rng rng(2718);
    const auto bin = cst::testing::check_binary_rules(rng, 100);
    CHECK_MESSAGE(bin.all(), bin.first_mismatch);
    const auto charge = cst::testing::check_charge_rule(rng, 100, PlantDesign{}, 1e-3);
    CHECK_MESSAGE(charge.all(), charge.first_mismatch);
}
