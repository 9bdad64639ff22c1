#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cst/data.hpp"
#include "cst/formulation.hpp"
#include "cst/milp.hpp"
#include "cst/sampling.hpp"
#include "cst/simulator.hpp"

namespace cst {

// Which part of each two-day window is optimised and evaluated.
struct HorizonSpec {
    std::size_t offset_steps = 0;
    std::size_t steps = 0;  // 0 means "to the end of the window"

    WeatherTrajectory apply(const WeatherTrajectory& full) const;
};

// Everything a planning or evaluation run shares.
struct PlanningContext {
    Plant plant;
    CostModel costs;
    PriceProfile prices;  // already cut to the horizon
    ModelOptions model;
    SolverConfig solver;
    HorizonSpec horizon;
    unsigned jobs = 1;
    bool polish = true;

    SimOptions sim_options() const { return SimOptions{model.epsilon}; }
};

struct PlanOutcome {
    DispatchPlan plan;
    SolveStatus status = SolveStatus::SolverError;
    double objective = 0.0;
    double mip_gap = 0.0;
    double seconds = 0.0;
};

// Deterministic optimum for one (already horizon-cut) trajectory.
// Throws SolverError when the solver returns no plan.
PlanOutcome solve_deterministic(const PlanningContext& ctx, const WeatherTrajectory& traj);

PlanOutcome perfect_knowledge(const PlanningContext& ctx, const WeatherTrajectory& traj);

// Stochastic program over the (horizon-cut) scenario trajectories.
PlanOutcome solve_smilp(const PlanningContext& ctx, const std::vector<WeatherTrajectory>& scenarios);

struct CandidateTable {
    std::vector<std::string> candidate_ids;
    std::vector<DispatchPlan> plans;
    std::vector<std::string> evaluation_ids;
    std::vector<std::vector<double>> scores;  // [candidate][evaluation] simulated profit
    std::vector<double> means;
    std::size_t selected = 0;
    std::vector<std::string> dropped;  // candidates whose solve failed

    std::string to_csv() const;
};

// Index of the largest mean; exact ties go to the smallest id (then index).
std::size_t argmax_with_tiebreak(const std::vector<double>& means, const std::vector<std::string>& ids);

using ScoreFn = std::function<double(const DispatchPlan&, std::size_t evaluation_index)>;

CandidateTable saa_select(std::vector<std::string> candidate_ids, std::vector<DispatchPlan> plans,
                          std::vector<std::string> evaluation_ids, const ScoreFn& score, unsigned jobs = 1);

struct HeuristicResult {
    DispatchPlan plan;
    CandidateTable table;
    std::string source_id;  // window the selected plan came from
    double seconds = 0.0;
};

// One candidate per scenario, scored on the scenarios.
HeuristicResult heuristic_1(const PlanningContext& ctx, const std::vector<WeatherWindow>& scenarios);

// One candidate per sampling window (or the `subset_size` most recent
// ones), scored on the whole sampling set.
HeuristicResult heuristic_2(const PlanningContext& ctx, const std::vector<WeatherWindow>& sampling,
                            std::optional<std::size_t> subset_size = std::nullopt);

// Typical day by 1-medoid over first-day DNI profiles, repeated to two days.
struct Heuristic3Result {
    DispatchPlan plan;
    std::string medoid_id;
    WeatherTrajectory typical;  // horizon-cut trajectory that was optimised
    double seconds = 0.0;
};
Heuristic3Result heuristic_3(const PlanningContext& ctx, const std::vector<WeatherWindow>& sampling,
                             std::uint64_t seed = 0);

// Simulated profit of a plan on a horizon-cut trajectory.
double simulated_profit(const PlanningContext& ctx, const DispatchPlan& plan, const WeatherTrajectory& traj);

}  // namespace cst
