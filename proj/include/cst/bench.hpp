#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cst/heuristics.hpp"

namespace cst {

// A plan to evaluate: either fixed, or re-optimised per trajectory (PK).
struct PlanSource {
    std::string name;
    std::optional<DispatchPlan> fixed;  // empty means perfect knowledge

    static PlanSource fixed_plan(std::string name, DispatchPlan plan) { return {std::move(name), std::move(plan)}; }
    static PlanSource perfect_knowledge(std::string name = "PK") { return {std::move(name), std::nullopt}; }
    bool is_pk() const { return !fixed.has_value(); }
};

struct TrajectoryRecord {
    std::string window_id;
    ProfitBreakdown profit;
    EventCounts events;
    double dispatched_mwh = 0.0;
    double sales_value = 0.0;
    double seconds = 0.0;  // plan solve (PK only) plus simulation
};

// Windows are full two-day windows; the context's horizon is applied here.
std::vector<TrajectoryRecord> evaluate_plan(const PlanningContext& ctx, const PlanSource& source,
                                            const std::vector<WeatherWindow>& windows);

// Sales value per MWh dispatched; absent when nothing was dispatched.
std::optional<double> dwa_price(const std::vector<TrajectoryRecord>& records);

// Linear interpolation at rank (n-1)p on the sorted values; p in [0, 1].
double percentile(std::vector<double> values, double p);

struct PercentileSummary {
    double mean = 0.0;
    double median = 0.0;
    double p025 = 0.0;
    double p975 = 0.0;
};
PercentileSummary percentile_summary(const std::vector<double>& values);

struct WelchResult {
    double t = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};
// Two-sided Welch test. Throws ValidationError for n < 2 or zero variance in both.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Profit components as reported: costs are positive numbers.
struct ComponentValues {
    double revenue = 0.0;
    double purchase = 0.0;
    double receiver_cost = 0.0;
    double pb_cost = 0.0;
    double profit = 0.0;
};
ComponentValues components_of(const ProfitBreakdown& p);

struct PlanSummary {
    std::string name;
    std::size_t n = 0;
    PercentileSummary revenue, purchase, receiver_cost, pb_cost, profit;
    std::optional<double> dwa;
    std::map<std::string, double> event_means;
    double eval_seconds = 0.0;     // sum of per-trajectory evaluation time
    double planning_seconds = 0.0;  // time spent producing the fixed plan
    std::vector<double> profits;    // per trajectory
    std::vector<std::string> window_ids;
    std::vector<ComponentValues> per_trajectory;
};

struct EvaluationReport {
    static constexpr int kSchemaVersion = 1;
    std::string category;
    std::vector<std::string> window_ids;
    std::vector<PlanSummary> plans;
    // p_values[i][j] for plans i < j; NaN when the test is degenerate.
    std::vector<std::vector<double>> p_values;

    nlohmann::json to_json() const;
    std::string to_text() const;
    std::string to_csv() const;  // one row per plan and trajectory
    std::string to_svg() const;  // mean profit bar chart

    // Largest |profit - (revenue - costs)| over the plan means.
    double component_identity_error() const;
};

struct PlanEvaluation {
    PlanSource source;
    std::vector<TrajectoryRecord> records;
    double planning_seconds = 0.0;
};

// Throws ValidationError when any plan has no records.
EvaluationReport build_report(const std::string& category, const std::vector<PlanEvaluation>& evaluations);

struct SensitivityRow {
    std::size_t size = 0;
    double expected_profit = 0.0;
    double seconds = 0.0;
    std::string source_id;
};

std::vector<SensitivityRow> sensitivity_h2(const PlanningContext& ctx, const std::vector<WeatherWindow>& sampling,
                                           const std::vector<WeatherWindow>& testing,
                                           const std::vector<std::size_t>& sizes);
std::string sensitivity_csv(const std::vector<SensitivityRow>& rows);
std::string sensitivity_svg(const std::vector<SensitivityRow>& rows);

}  // namespace cst
