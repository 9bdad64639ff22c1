#include <doctest.h>

#include <sstream>

#include "cst/errors.hpp"
#include "cst/simulator.hpp"
#include "safety.hpp"
#include "support.hpp"

using namespace cst;
using namespace cst::testing;

namespace {

WeatherTrajectory desk_traj(std::uint64_t seed, std::size_t window, double dropout) {
    return synthetic_windows(seed, 2019, 2019, dropout)[window].traj.slice(kDeskOffset, kDeskSteps);
}

// receiver from 09:30 (startup), generating until 15:00; power block
// starting at 13:00 and running to 19:00
DispatchPlan day_plan() {
    auto p = DispatchPlan::all_off(24);
    for (std::size_t k = 1; k < 12; ++k) p.y_r[k] = 1;
    p.y_rsup[1] = 1;
    p.y_rsd[11] = 1;
    for (std::size_t k = 2; k < 12; ++k) p.q_r_hat[k] = 600.0;
    for (std::size_t k = 8; k < 20; ++k) p.y_c[k] = 1;
    p.y_csup[8] = 1;
    p.y_csd[20] = 1;
    p.q_c_hat[8] = 164.3;
    for (std::size_t k = 9; k < 20; ++k) p.q_c_hat[k] = 250.0;
    return p;
}

}  // namespace

TEST_CASE("an idle plan earns nothing and keeps storage at the floor") {
    const Plant plant;
    const auto r = simulate(plant, CostModel{}, DispatchPlan::all_off(24), desk_traj(1, 3, 0.0), desk_prices());
    CHECK(r.profit.profit == 0.0);
    CHECK(r.events.rsup == 0);
    CHECK(r.events.csup == 0);
    for (const auto& s : r.steps) CHECK(s.ctrl.soc == doctest::Approx(plant.design.storage_floor()));
    CHECK_FALSE(r.dispatched_mwh > 0.0);
}

TEST_CASE("a clear day follows the plan") {
    const Plant plant;
    const PlantDesign& d = plant.design;
    const auto r = simulate(plant, CostModel{}, day_plan(), desk_traj(1, 3, 0.0), desk_prices());
    // startup needs e_r / (dt q_ru) = 2 steps
    CHECK(r.steps[1].ctrl.d_rsu == 1);
    CHECK(r.steps[2].ctrl.d_rsu == 1);
    CHECK(r.steps[3].ctrl.d_r == 1);
    CHECK(r.steps[11].ctrl.d_rsd == 1);
    CHECK(r.steps[12].ctrl.d_r == 0);
    CHECK(r.events.rsup == 1);
    CHECK(r.events.rsd_planned == 1);
    CHECK(r.events.rsd_forced == 0);
    CHECK(r.events.csup == 1);
    CHECK(r.events.csd_planned == 1);
    CHECK(r.events.csd_forced == 0);
    CHECK(r.steps[10].ctrl.d_c == 1);
    CHECK(r.steps[10].ctrl.q_cact == doctest::Approx(250.0));
    CHECK(r.steps[10].ctrl.w == doctest::Approx(d.eta_p * 250.0 + d.pb_intercept()));
    CHECK(r.profit.revenue > 0.0);
}

TEST_CASE("profit terms recomputed from the steps") {
    const Plant plant;
    CostModel costs;
    const auto prices = desk_prices();
    const auto r = simulate(plant, costs, day_plan(), desk_traj(2, 7, 0.1), prices);
    double revenue = 0, purchase = 0, rec = 0, pb = 0;
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
        const auto& c = r.steps[k].ctrl;
        revenue += 0.5 * prices.prices[k] * c.w_sold;
        purchase += 0.5 * prices.prices[k] * c.w_purch;
        rec += 0.5 * costs.c_rec * c.q_ract + costs.c_rsup * c.d_rsup + costs.alpha_r_sd * c.d_rsd;
        pb += 0.5 * costs.c_c * c.w + costs.c_dw * c.w_ramp + costs.c_csup * c.d_csup + costs.alpha_c_sd * c.d_csd;
    }
    CHECK(r.profit.revenue == doctest::Approx(revenue));
    CHECK(r.profit.purchase_cost == doctest::Approx(purchase));
    CHECK(r.profit.receiver_opex + r.profit.receiver_sd_cost == doctest::Approx(rec));
    CHECK(r.profit.pb_opex + r.profit.pb_sd_cost == doctest::Approx(pb));
    CHECK(r.profit.profit == doctest::Approx(revenue - purchase - rec - pb));
    const auto again = profit_components(r, costs);
    CHECK(again.profit == r.profit.profit);

    costs.lambda_discount = 0.9;
    const auto disc = simulate(plant, costs, day_plan(), desk_traj(2, 7, 0.1), prices);
    CHECK(disc.profit.revenue < r.profit.revenue);
}

TEST_CASE("no sun means no startup and no generation") {
    const Plant plant;
    const auto r = simulate(plant, CostModel{}, day_plan(), desk_traj(1, 3, 1.0), desk_prices());
    CHECK(r.events.rsup == 0);
    CHECK(r.events.csup == 0);
    for (const auto& s : r.steps) {
        CHECK(s.ctrl.d_r == 0);
        CHECK(s.ctrl.d_c == 0);
    }
    CHECK(r.profit.profit == 0.0);
}

TEST_CASE("clouds during planned generation force a receiver shutdown") {
    const Plant plant;
    auto traj = desk_traj(1, 3, 0.0);
    for (std::size_t k = 6; k < 24; ++k) traj.samples[k].dni = 0.0;
    const auto r = simulate(plant, CostModel{}, day_plan(), traj, desk_prices());
    CHECK(r.events.rsd_forced == 1);
    CHECK(r.events.rsd_planned == 0);
    CHECK(r.steps[5].ctrl.d_rsd == 1);
    CHECK(r.steps[5].rsd_forced);
}

TEST_CASE("an empty store forces the power block down") {
    const Plant plant;
    auto traj = desk_traj(1, 3, 0.0);
    auto plan = day_plan();
    for (auto& q : plan.q_r_hat)
        if (q > 0) q = plant.design.q_rl;  // charge slowly
    for (std::size_t k = 9; k < 20; ++k) plan.q_c_hat[k] = plant.design.q_u;  // discharge fast
    const auto r = simulate(plant, CostModel{}, plan, traj, desk_prices());
    CHECK(r.events.csd_forced >= 1);
    SafetyTally t;
    audit_run(r, plant.design, t, "drain");
    CHECK(t.violations == 0);
}

TEST_CASE("a full store curtails the receiver") {
    const Plant plant;
    auto plan = DispatchPlan::all_off(24);
    for (std::size_t k = 0; k < 24; ++k) plan.y_r[k] = 1;
    plan.y_rsup[0] = 1;
    plan.y_rsd[23] = 1;
    for (std::size_t k = 1; k < 24; ++k) plan.q_r_hat[k] = 700.0;
    auto traj = desk_traj(1, 3, 0.0);
    for (auto& s : traj.samples) s.dni = 1.0;
    const auto r = simulate(plant, CostModel{}, plan, traj, desk_prices());
    bool curtailed = false;
    for (const auto& s : r.steps) curtailed = curtailed || s.curtailed;
    CHECK(curtailed);
    SafetyTally t;
    audit_run(r, plant.design, t, "fill");
    CHECK(t.violations == 0);
    CHECK(r.steps.back().ctrl.soc <= plant.design.e_u + 1e-9);
}

TEST_CASE("bad inputs are rejected") {
    const Plant plant;
    const auto traj = desk_traj(1, 3, 0.0);
    CHECK_THROWS_AS(simulate(plant, CostModel{}, DispatchPlan::all_off(23), traj, desk_prices()), ValidationError);
    CHECK_THROWS_AS(simulate(plant, CostModel{}, DispatchPlan::all_off(24), traj,
                             two_tier_price_profile(20, 0.5, {}, 1.0, 1.0)),
                    ValidationError);
    auto bad = day_plan();
    bad.y_rsup[1] = 0;
    CHECK_THROWS_AS(simulate(plant, CostModel{}, bad, traj, desk_prices()), ValidationError);
}

TEST_CASE("trace csv") {
    const auto r = simulate(Plant{}, CostModel{}, day_plan(), desk_traj(1, 3, 0.0), desk_prices());
    const auto text = trace_csv(r);
    std::istringstream in(text);
    std::string header, line;
    std::getline(in, header);
    CHECK(header.rfind("step,timestamp,price,q_p,", 0) == 0);
    const auto columns = std::count(header.begin(), header.end(), ',') + 1;
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') + 1 == columns);
        ++rows;
    }
    CHECK(rows == 24);
    CHECK(text.find("2019-01-04T09:00:00") != std::string::npos);
}

TEST_CASE("storage bounds and generation envelopes hold on random plans and weather") {
    const auto t = safety_property(99, 500);
    CHECK(t.pairs == 500);
    CHECK_MESSAGE(t.violations == 0, t.first);
    // the sample must exercise the protective paths
    CHECK(t.curtailed_steps > 0);
    CHECK(t.forced_shutdowns > 0);
}
