#include <doctest.h>

#include <algorithm>

#include "cst/errors.hpp"
#include "cst/heuristics.hpp"
#include "support.hpp"

using namespace cst;
using namespace cst::testing;

TEST_CASE("argmax breaks exact ties by the smaller id") {
    CHECK(argmax_with_tiebreak({1.0, 3.0, 2.0}, {"a", "b", "c"}) == 1);
    CHECK(argmax_with_tiebreak({5.0, 5.0}, {"2019-01-09", "2019-01-02"}) == 1);
    CHECK(argmax_with_tiebreak({5.0, 5.0 + 1e-12}, {"a", "b"}) == 1);
    CHECK(argmax_with_tiebreak({-1.0}, {"x"}) == 0);
}

TEST_CASE("sample-average selection from a score table") {
    // each plan carries its row of the score grid in q_r_hat[0]
    const std::vector<std::vector<double>> grid{{1, 2, 3}, {2, 2, 2}, {0, 0, 9}};
    std::vector<DispatchPlan> plans(3, DispatchPlan::all_off(4));
    for (std::size_t i = 0; i < 3; ++i) plans[i].q_r_hat[0] = static_cast<double>(i);
    const std::vector<std::string> cands{"c0", "c1", "c2"};
    const ScoreFn by_tag = [&](const DispatchPlan& p, std::size_t e) {
        return grid[static_cast<std::size_t>(p.q_r_hat[0])][e];
    };
    for (unsigned jobs : {1u, 3u}) {
        const auto t = saa_select(cands, plans, {"e0", "e1", "e2"}, by_tag, jobs);
        CHECK((t.means == std::vector<double>{2.0, 2.0, 3.0}));
        CHECK(t.selected == 2);
        CHECK(t.scores[0] == grid[0]);
        const auto csv = t.to_csv();
        CHECK(csv.rfind("candidate,e0,e1,e2,mean,selected\n", 0) == 0);
        CHECK(csv.find("c2,0,0,9,3,1\n") != std::string::npos);
        CHECK(csv.find("c0,1,2,3,2,0\n") != std::string::npos);
    }
    CHECK_THROWS(saa_select({}, {}, {"e0"}, by_tag, 1));
}

TEST_CASE("horizon cut") {
    const auto w = synthetic_windows(1, 2019, 2019)[0];
    const auto cut = HorizonSpec{18, 24}.apply(w.traj);
    CHECK(cut.size() == 24);
    CHECK(hour_of_day(cut.start_timestamp) == 9.0);
    CHECK((HorizonSpec{0, 0}.apply(w.traj).size()) == 96);
    CHECK((HorizonSpec{90, 0}.apply(w.traj).size()) == 6);
    CHECK_THROWS_AS((HorizonSpec{96, 0}.apply(w.traj)), ValidationError);
    CHECK_THROWS_AS((HorizonSpec{80, 24}.apply(w.traj)), ValidationError);
}

TEST_CASE("simulated profit uses the context") {
    const auto ctx = desk_context();
    const auto w = synthetic_windows(1, 2019, 2019)[2];
    const auto traj = ctx.horizon.apply(w.traj);
    CHECK(simulated_profit(ctx, DispatchPlan::all_off(24), traj) == 0.0);
}

TEST_CASE("deterministic planning beats idling on its own weather") {
    const auto ctx = desk_context();
    const auto w = synthetic_windows(3, 2019, 2019, 0.0)[5];
    const auto traj = ctx.horizon.apply(w.traj);
    const auto out = solve_deterministic(ctx, traj);
    CHECK(out.plan.horizon() == 24);
    CHECK(out.objective > 0.0);
    CHECK(simulated_profit(ctx, out.plan, traj) == doctest::Approx(out.objective).epsilon(0.01));
}

TEST_CASE("heuristic 1: one candidate per scenario, scored on the scenarios") {
    const auto ctx = desk_context();
    const auto windows = synthetic_windows(8, 2019, 2019);
    const std::vector<WeatherWindow> scen{windows[4], windows[17]};
    const auto h = heuristic_1(ctx, scen);
    CHECK((h.table.candidate_ids == std::vector<std::string>{windows[4].id, windows[17].id}));
    CHECK(h.table.evaluation_ids == h.table.candidate_ids);
    REQUIRE(h.table.scores.size() == 2);
    const auto best = *std::max_element(h.table.means.begin(), h.table.means.end());
    CHECK(h.table.means[h.table.selected] == best);
    CHECK(h.source_id == h.table.candidate_ids[h.table.selected]);
    CHECK(h.plan == h.table.plans[h.table.selected]);
    // cross-check one score against a direct simulation
    CHECK(h.table.scores[0][1] == doctest::Approx(simulated_profit(ctx, h.table.plans[0], ctx.horizon.apply(scen[1].traj))));
}

TEST_CASE("heuristic 2: the most recent windows provide the candidates") {
    const auto ctx = desk_context();
    const auto windows = synthetic_windows(8, 2019, 2019);
    const std::vector<WeatherWindow> sampling{windows[1], windows[9], windows[3], windows[20]};
    const auto h = heuristic_2(ctx, sampling, 2);
    CHECK((h.table.candidate_ids == std::vector<std::string>{windows[9].id, windows[20].id}));
    CHECK(h.table.evaluation_ids.size() == 4);
    CHECK(h.table.scores[0].size() == 4);
    CHECK_THROWS(heuristic_2(ctx, sampling, 0));
}

TEST_CASE("heuristic 3: the medoid day repeated") {
    const auto ctx = desk_context();
    const auto windows = synthetic_windows(8, 2019, 2019);
    const std::vector<WeatherWindow> sampling(windows.begin(), windows.begin() + 7);
    const auto h = heuristic_3(ctx, sampling, 5);
    const auto it = std::find_if(sampling.begin(), sampling.end(),
                                 [&](const WeatherWindow& w) { return w.id == h.medoid_id; });
    REQUIRE(it != sampling.end());
    REQUIRE(h.typical.size() == 24);
    for (std::size_t k = 0; k < 24; ++k) CHECK(h.typical.samples[k].dni == it->traj.samples[18 + k].dni);
    CHECK(h.plan.horizon() == 24);

    // a sampling set of identical days picks the first
    std::vector<WeatherWindow> same(3, sampling[0]);
    same[1].id = "b";
    same[2].id = "c";
    const auto h2 = heuristic_3(ctx, same, 1);
    CHECK(h2.typical.samples[10].dni == sampling[0].traj.samples[28].dni);
}
