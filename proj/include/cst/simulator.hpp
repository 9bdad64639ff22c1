#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cst/data.hpp"
#include "cst/formulation.hpp"
#include "cst/plant.hpp"

namespace cst {

struct StepRecord {
    ControlStep ctrl;
    double q_p = 0.0;      // conditioned potential power used by the rules
    double q_p_raw = 0.0;  // potential power before conditioning
    double dump = 0.0;
    double price = 0.0;
    bool curtailed = false;  // receiver output cut to storage headroom
    bool rsd_forced = false;
    bool csd_forced = false;
};

struct ProfitBreakdown {
    double revenue = 0.0;
    double purchase_cost = 0.0;
    double receiver_opex = 0.0;
    double receiver_sd_cost = 0.0;
    double pb_opex = 0.0;
    double pb_sd_cost = 0.0;
    double profit = 0.0;
};

struct EventCounts {
    int rsup = 0;
    int rsd_planned = 0;
    int rsd_forced = 0;
    int csup = 0;
    int csd_planned = 0;
    int csd_forced = 0;
};

struct SimulationResult {
    std::vector<StepRecord> steps;
    ProfitBreakdown profit;
    EventCounts events;
    double dispatched_mwh = 0.0;  // sum of dt * dispatched power, undiscounted
    double sales_value = 0.0;     // sum of dt * price * dispatched power, undiscounted
    Timestamp start{};
    double dt_hours = 0.0;
};

struct SimOptions {
    double epsilon = 1e-3;  // must match the optimiser's value
};

SimulationResult simulate(const Plant& plant, const CostModel& costs, const DispatchPlan& plan,
                          const WeatherTrajectory& traj, const PriceProfile& prices, const SimOptions& options = {});

// Discounted profit terms recomputed from the per-step records.
ProfitBreakdown profit_components(const SimulationResult& result, const CostModel& costs);

// One row per step; the column order is documented in docs/formats.md.
std::string trace_csv(const SimulationResult& result);
void write_trace_csv(const SimulationResult& result, const std::filesystem::path& path);

}  // namespace cst
