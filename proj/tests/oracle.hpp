#pragma once

// Replays an optimised plan through the simulator and compares the result
// with the control trajectories the MILP chose for the same scenario.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cst/formulation.hpp"
#include "cst/simulator.hpp"

namespace cst::testing {

struct OracleReport {
    double max_control_error = 0.0;  // binaries, receiver/PB output, storage
    double max_profit_rel_error = 0.0;
    std::string worst;  // description of the largest control deviation
};

inline OracleReport compare_with_simulator(const Formulation& f, const Solution& sol, const Plant& plant,
                                           const std::vector<WeatherTrajectory>& scenarios,
                                           const PriceProfile& prices) {
    OracleReport rep;
    const auto plan = extract_dispatch_plan(sol, f);
    const auto milp_profit = scenario_objectives(sol, f);
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        const auto controls = extract_control_trajectories(sol, f, s);
        const auto sim = simulate(plant, f.costs, plan, scenarios[s], prices, SimOptions{f.epsilon});
        for (std::size_t k = 0; k < controls.size(); ++k) {
            const auto& a = controls[k];
            const auto& b = sim.steps[k].ctrl;
            const std::pair<const char*, double> diffs[] = {
                {"d_rsup", a.d_rsup - b.d_rsup}, {"d_rsu", a.d_rsu - b.d_rsu}, {"d_r", a.d_r - b.d_r},
                {"d_rsd", a.d_rsd - b.d_rsd},    {"d_csup", a.d_csup - b.d_csup}, {"d_csu", a.d_csu - b.d_csu},
                {"d_c", a.d_c - b.d_c},          {"d_csd", a.d_csd - b.d_csd},   {"q_ract", a.q_ract - b.q_ract},
                {"q_cact", a.q_cact - b.q_cact}, {"soc", a.soc - b.soc}};
            for (const auto& [name, d] : diffs)
                if (std::abs(d) > rep.max_control_error) {
                    rep.max_control_error = std::abs(d);
                    rep.worst = std::string(name) + " scenario " + std::to_string(s) + " step " + std::to_string(k);
                }
        }
        const double p = sim.profit.profit;
        rep.max_profit_rel_error = std::max(rep.max_profit_rel_error,
                                            std::abs(p - milp_profit[s]) / std::max(1.0, std::abs(milp_profit[s])));
    }
    return rep;
}

}  // namespace cst::testing
