#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cst/data.hpp"
#include "cst/logic.hpp"
#include "cst/milp.hpp"
#include "cst/plant.hpp"

namespace cst {

// Operation and degradation costs. Energy-proportional terms are per MWh;
// event terms are per event and are not scaled by the step length.
struct CostModel {
    double c_rec = 3.7;        // per MWh_t delivered by the receiver
    double c_c = 1.7;          // per MWh_e generated by the power block
    double c_rsup = 7000.0;    // per receiver cold start
    double c_csup = 5451.0;    // per power-block cold start
    double c_dw = 0.59;        // per MW_e of ramping
    double alpha_r_sd = 7000.0;
    double alpha_c_sd = 5451.0;
    double lambda_discount = 1.0;  // per step

    void validate() const;
    // lambda^(k+1) for 0-based step k.
    double discount(std::size_t k) const;
};

// Scenario-independent schedule. Binary entries are stored as 0/1 ints.
struct DispatchPlan {
    std::vector<int> y_r, y_rsup, y_rsd;
    std::vector<int> y_c, y_csup, y_csd;
    std::vector<double> q_r_hat, q_c_hat;

    std::size_t horizon() const { return y_r.size(); }
    static DispatchPlan all_off(std::size_t horizon);

    // Checks the logical plan rules and the setpoint envelopes. `daylight`,
    // when given, is a per-step 0/1 mask the receiver plan must respect.
    // Throws ValidationError naming the first broken rule.
    void validate(const PlantDesign& design, const std::vector<int>* daylight = nullptr,
                  double tol = 1e-6) const;

    bool operator==(const DispatchPlan&) const = default;
};

// Plan file: JSON with one array per plan symbol.
std::string plan_to_json(const DispatchPlan& plan, int indent = 2);
DispatchPlan plan_from_json(std::string_view text);

struct ModelOptions {
    double epsilon = 1e-3;
    // Clock hours (sunrise, sunset). Without them the receiver may run
    // between the first and last step with positive DNI in any scenario.
    std::optional<std::pair<double, double>> daylight_hours;
    std::string name = "smilp";
};

// Realised per-step operation for one scenario.
struct ControlStep {
    int d_rsup = 0, d_rsu = 0, d_r = 0, d_rsd = 0;
    int d_csup = 0, d_csu = 0, d_c = 0, d_csd = 0;
    std::array<int, 7> z{};
    double q_ract = 0, q_cact = 0;
    double e_rsu = 0, e_csu = 0, phi_r = 0, phi_c = 0;
    double w = 0, w_ramp = 0, w_sold = 0, w_purch = 0;
    double soc = 0, varphi = 0, q_avail = 0, q_avail_gen = 0;
};

class SmilpIndexMap {
public:
    static const std::vector<std::string>& plan_symbols();
    static const std::vector<std::string>& control_symbols();
    static bool is_binary_symbol(std::string_view symbol);

    std::size_t horizon() const { return horizon_; }
    std::size_t scenarios() const { return scenarios_; }

    // Variable index; throws std::out_of_range on unknown symbol/index.
    int plan(std::string_view symbol, std::size_t k) const;
    int control(std::string_view symbol, std::size_t k, std::size_t s) const;
    // All control variable indices of one scenario.
    std::vector<int> scenario_variables(std::size_t s) const;

    std::string to_json(const MilpModel& model, int indent = 2) const;

private:
    friend class SmilpBuilder;
    std::size_t horizon_ = 0;
    std::size_t scenarios_ = 0;
    std::map<std::string, std::vector<int>, std::less<>> plan_;
    std::map<std::string, std::vector<std::vector<int>>, std::less<>> control_;  // [s][k]
};

struct Formulation {
    MilpModel model;
    SmilpIndexMap index;
    logic::BigMLog big_m;
    // Conditioned potential receiver power, [s][k].
    std::vector<std::vector<double>> potential_power;
    std::vector<int> daylight;
    std::vector<double> prices;
    double dt_hours = 0.0;
    double epsilon = 1e-3;
    PlantDesign design;
    CostModel costs;
};

std::vector<int> daylight_mask(const std::vector<WeatherTrajectory>& scenarios, const ModelOptions& options);

Formulation build_smilp(const Plant& plant, const CostModel& costs, const std::vector<WeatherTrajectory>& scenarios,
                        const PriceProfile& prices, const ModelOptions& options = {});

Formulation build_deterministic(const Plant& plant, const CostModel& costs, const WeatherTrajectory& trajectory,
                                const PriceProfile& prices, const ModelOptions& options = {});

// Rounds plan binaries (tolerance as in SolverConfig) and re-validates.
DispatchPlan extract_dispatch_plan(const Solution& solution, const Formulation& f, double tol = 1e-6);
std::vector<ControlStep> extract_control_trajectories(const Solution& solution, const Formulation& f,
                                                      std::size_t s, double tol = 1e-6);

// Discounted profit of each scenario as the MILP sees it: the objective
// restricted to that scenario's variables, times N_s.
std::vector<double> scenario_objectives(const Solution& solution, const Formulation& f);

struct OptimizeResult {
    Solution solution;
    std::optional<DispatchPlan> plan;
    double build_seconds = 0.0;
    double solve_seconds = 0.0;
    bool polished = false;
};

// Solves, then (when there is an incumbent) fixes the plan and re-solves
// the control problem to optimality so the reported controls are the best
// response to the chosen plan.
OptimizeResult optimize(const Formulation& f, const SolverConfig& config, bool polish = true);

// Numerical re-check of every model constraint on extracted values.
struct AuditReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};
AuditReport audit_controls(const Formulation& f, const DispatchPlan& plan, const std::vector<ControlStep>& controls,
                           std::size_t s, double tol = 1e-6);

}  // namespace cst
