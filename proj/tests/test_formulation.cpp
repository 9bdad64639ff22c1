#include <doctest.h>

#include <set>

#include <nlohmann/json.hpp>

#include "cst/errors.hpp"
#include "cst/formulation.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace cst;
using namespace cst::testing;

namespace {

std::vector<WeatherTrajectory> desk_scenarios(const std::vector<std::size_t>& picks, std::uint64_t seed = 5) {
    const auto windows = synthetic_windows(seed, 2019, 2019);
    std::vector<WeatherTrajectory> out;
    for (auto i : picks) out.push_back(windows[i].traj.slice(kDeskOffset, kDeskSteps));
    return out;
}

DispatchPlan simple_plan(std::size_t K) {
    // receiver 09:30-15:00, power block 13:00-19:00
    auto p = DispatchPlan::all_off(K);
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

TEST_CASE("plan rules") {
    const PlantDesign d;
    const auto good = simple_plan(24);
    CHECK_NOTHROW(good.validate(d));
    CHECK_NOTHROW(DispatchPlan::all_off(24).validate(d));

    auto no_start = good;
    no_start.y_rsup[1] = 0;
    CHECK_THROWS_AS(no_start.validate(d), ValidationError);

    auto no_stop = good;
    no_stop.y_rsd[11] = 0;
    CHECK_THROWS_AS(no_stop.validate(d), ValidationError);

    auto high = good;
    high.q_r_hat[5] = 800.0;
    CHECK_THROWS_AS(high.validate(d), ValidationError);

    auto low_pb = good;
    low_pb.q_c_hat[10] = 10.0;
    CHECK_THROWS_AS(low_pb.validate(d), ValidationError);

    auto pb_no_sd = good;
    pb_no_sd.y_csd[20] = 0;
    CHECK_THROWS_AS(pb_no_sd.validate(d), ValidationError);

    auto binary = good;
    binary.y_c[3] = 2;
    CHECK_THROWS_AS(binary.validate(d), ValidationError);

    auto short_vec = good;
    short_vec.q_c_hat.pop_back();
    CHECK_THROWS_AS(short_vec.validate(d), ValidationError);

    std::vector<int> dark(24, 0);
    CHECK_THROWS_AS(good.validate(d, &dark), ValidationError);
}

TEST_CASE("random plans from the test generator are valid") {
    Rng rng(4);
    const PlantDesign d;
    for (int i = 0; i < 200; ++i) CHECK_NOTHROW(random_plan(rng, 24 + rng.below(73), d).validate(d));
}

TEST_CASE("plan json round trip") {
    const auto p = simple_plan(24);
    CHECK(plan_from_json(plan_to_json(p)) == p);
    CHECK_THROWS_AS(plan_from_json("{not json"), IoError);
    CHECK_THROWS_AS(plan_from_json("{\"y_r\": [1]}"), ValidationError);
}

TEST_CASE("cost model") {
    CostModel c;
    CHECK(c.discount(0) == 1.0);
    c.lambda_discount = 0.5;
    CHECK(c.discount(2) == 0.125);
    c.c_rec = -1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("daylight mask") {
    const auto scen = desk_scenarios({0, 1});
    const auto mask = daylight_mask(scen, ModelOptions{});
    REQUIRE(mask.size() == 24);
    CHECK(mask.front() == 1);  // 09:00 is daylight in the synthetic sky
    ModelOptions hours;
    hours.daylight_hours = std::pair{10.0, 15.0};
    const auto fixed = daylight_mask(scen, hours);
    CHECK(fixed[2] == 0);   // 10:00 is on the boundary
    CHECK(fixed[3] == 1);
    CHECK(fixed[11] == 1);  // 14:30
    CHECK(fixed[12] == 0);
}

TEST_CASE("index map covers every plan and control symbol") {
    const auto scen = desk_scenarios({3, 9, 17});
    const auto f = build_smilp(Plant{}, CostModel{}, scen, desk_prices());
    CHECK(f.index.horizon() == 24);
    CHECK(f.index.scenarios() == 3);
    std::set<int> seen;
    for (const auto& sym : SmilpIndexMap::plan_symbols())
        for (std::size_t k = 0; k < 24; ++k) CHECK(seen.insert(f.index.plan(sym, k)).second);
    for (std::size_t s = 0; s < 3; ++s) {
        const auto vars = f.index.scenario_variables(s);
        for (int v : vars) CHECK(seen.insert(v).second);
    }
    CHECK(seen.size() <= f.model.num_vars());
    CHECK_THROWS_AS(f.index.plan("nope", 0), std::out_of_range);
    CHECK_THROWS_AS(f.index.control("q_ract", 0, 3), std::out_of_range);
    CHECK(SmilpIndexMap::is_binary_symbol("y_r"));
    CHECK_FALSE(SmilpIndexMap::is_binary_symbol("q_r_hat"));
    const auto j = nlohmann::json::parse(f.index.to_json(f.model));
    CHECK(j.contains("plan"));
}

TEST_CASE("every big-M dominates the expression it guards") {
    const auto scen = desk_scenarios({3, 9, 17});
    const auto f = build_smilp(Plant{}, CostModel{}, scen, desk_prices());
    REQUIRE_FALSE(f.big_m.empty());
    double largest = 0.0;
    for (const auto& r : f.big_m) {
        CHECK(r.m > f.model.max_abs(r.guarded));
        largest = std::max(largest, r.m);
    }
    // no single global constant: M values vary by family
    std::set<double> distinct;
    for (const auto& r : f.big_m) distinct.insert(r.m);
    CHECK(distinct.size() > 3);
    CHECK(largest < 1e5);
}

TEST_CASE("inconsistent inputs are rejected") {
    auto scen = desk_scenarios({1, 2});
    scen[1] = scen[1].slice(0, 20);
    CHECK_THROWS_AS(build_smilp(Plant{}, CostModel{}, scen, desk_prices()), ValidationError);
    CHECK_THROWS_AS(build_smilp(Plant{}, CostModel{}, {}, desk_prices()), ValidationError);
    const auto one = desk_scenarios({1});
    CHECK_THROWS_AS(build_deterministic(Plant{}, CostModel{}, one[0], two_tier_price_profile(10, 0.5, {}, 1, 1)),
                    ValidationError);
}

TEST_CASE("deterministic optimum replays exactly in the simulator") {
    const auto scen = desk_scenarios({4});
    const Plant plant;
    const auto prices = desk_prices();
    const auto f = build_deterministic(plant, CostModel{}, scen[0], prices);
    SolverConfig cfg;
    cfg.mip_gap_target = 0.005;
    const auto r = optimize(f, cfg);
    REQUIRE(r.plan);
    CHECK(r.solution.status != SolveStatus::Infeasible);
    const auto rep = compare_with_simulator(f, r.solution, plant, scen, prices);
    CHECK_MESSAGE(rep.max_control_error <= 1e-6, rep.worst);
    CHECK(rep.max_profit_rel_error <= 1e-4);
    const auto controls = extract_control_trajectories(r.solution, f, 0);
    const auto audit = audit_controls(f, *r.plan, controls, 0);
    CHECK_MESSAGE(audit.ok(), (audit.ok() ? std::string() : audit.violations.front()));
    // the optimum is at least as good as doing nothing
    CHECK(r.solution.objective_value >= -1e-6);
}

TEST_CASE("two-scenario program: per-scenario profits average to the objective") {
    const auto scen = desk_scenarios({6, 20});
    const Plant plant;
    const auto prices = desk_prices();
    const auto f = build_smilp(plant, CostModel{}, scen, prices);
    SolverConfig cfg;
    cfg.mip_gap_target = 0.01;
    const auto r = optimize(f, cfg);
    REQUIRE(r.plan);
    const auto per = scenario_objectives(r.solution, f);
    REQUIRE(per.size() == 2);
    CHECK((per[0] + per[1]) / 2.0 == doctest::Approx(r.solution.objective_value).epsilon(1e-6));
    const auto rep = compare_with_simulator(f, r.solution, plant, scen, prices);
    CHECK_MESSAGE(rep.max_control_error <= 1e-6, rep.worst);
    CHECK(rep.max_profit_rel_error <= 1e-4);
    for (std::size_t s = 0; s < 2; ++s) {
        const auto audit = audit_controls(f, *r.plan, extract_control_trajectories(r.solution, f, s), s);
        CHECK(audit.ok());
    }
}
