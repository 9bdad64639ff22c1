#include "cst/heuristics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <spdlog/spdlog.h>

#include "cst/errors.hpp"
#include "cst/parallel.hpp"

namespace cst {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

WeatherTrajectory HorizonSpec::apply(const WeatherTrajectory& full) const {
    if (offset_steps >= full.size()) throw ValidationError("horizon offset lies beyond the trajectory");
    const std::size_t count = steps == 0 ? full.size() - offset_steps : steps;
    if (offset_steps + count > full.size()) throw ValidationError("horizon runs past the end of the trajectory");
    return full.slice(offset_steps, count);
}

PlanOutcome solve_deterministic(const PlanningContext& ctx, const WeatherTrajectory& traj) {
    return solve_smilp(ctx, {traj});
}

PlanOutcome perfect_knowledge(const PlanningContext& ctx, const WeatherTrajectory& traj) {
    return solve_deterministic(ctx, traj);
}

PlanOutcome solve_smilp(const PlanningContext& ctx, const std::vector<WeatherTrajectory>& scenarios) {
    const auto t0 = std::chrono::steady_clock::now();
    const Formulation f = build_smilp(ctx.plant, ctx.costs, scenarios, ctx.prices, ctx.model);
    OptimizeResult r = optimize(f, ctx.solver, ctx.polish);
    if (!r.plan)
        throw SolverError("no dispatch plan: solver finished with status " + to_string(r.solution.status) +
                          (r.solution.message.empty() ? "" : " (" + r.solution.message + ")"));
    PlanOutcome out;
    out.plan = std::move(*r.plan);
    out.status = r.solution.status;
    out.objective = r.solution.objective_value;
    out.mip_gap = r.solution.mip_gap;
    out.seconds = seconds_since(t0);
    return out;
}

double simulated_profit(const PlanningContext& ctx, const DispatchPlan& plan, const WeatherTrajectory& traj) {
    return simulate(ctx.plant, ctx.costs, plan, traj, ctx.prices, ctx.sim_options()).profit.profit;
}

// ------------------------------------------------------------- selection

std::size_t argmax_with_tiebreak(const std::vector<double>& means, const std::vector<std::string>& ids) {
    if (means.empty()) throw ValidationError("no candidates to select from");
    std::size_t best = 0;
    for (std::size_t i = 1; i < means.size(); ++i) {
        if (means[i] > means[best]) {
            best = i;
        } else if (means[i] == means[best] && !ids.empty() && ids[i] < ids[best]) {
            best = i;
        }
    }
    return best;
}

CandidateTable saa_select(std::vector<std::string> candidate_ids, std::vector<DispatchPlan> plans,
                          std::vector<std::string> evaluation_ids, const ScoreFn& score, unsigned jobs) {
    if (plans.empty()) throw ValidationError("saa_select needs at least one candidate");
    if (evaluation_ids.empty()) throw ValidationError("saa_select needs at least one evaluation trajectory");
    if (candidate_ids.size() != plans.size()) throw ValidationError("candidate ids and plans differ in length");
    CandidateTable t;
    t.candidate_ids = std::move(candidate_ids);
    t.plans = std::move(plans);
    t.evaluation_ids = std::move(evaluation_ids);
    const std::size_t n = t.plans.size(), m = t.evaluation_ids.size();
    t.scores.assign(n, std::vector<double>(m, 0.0));
    parallel_for(n * m, jobs, [&](std::size_t idx) {
        const std::size_t i = idx / m, j = idx % m;
        t.scores[i][j] = score(t.plans[i], j);
    });
    t.means.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        t.means[i] = std::accumulate(t.scores[i].begin(), t.scores[i].end(), 0.0) / static_cast<double>(m);
    t.selected = argmax_with_tiebreak(t.means, t.candidate_ids);
    return t;
}

std::string CandidateTable::to_csv() const {
    std::string out = "candidate";
    for (const auto& e : evaluation_ids) out += "," + e;
    out += ",mean,selected\n";
    char buf[64];
    for (std::size_t i = 0; i < plans.size(); ++i) {
        out += candidate_ids[i];
        for (double v : scores[i]) {
            std::snprintf(buf, sizeof buf, ",%.10g", v);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, ",%.10g,%d\n", means[i], i == selected ? 1 : 0);
        out += buf;
    }
    return out;
}

// ------------------------------------------------------------ heuristics

namespace {

// Solves one deterministic model per source window; failures are logged and
// dropped.
void build_candidates(const PlanningContext& ctx, const std::vector<WeatherWindow>& sources,
                      std::vector<std::string>& ids, std::vector<DispatchPlan>& plans,
                      std::vector<std::string>& dropped) {
    std::vector<std::optional<DispatchPlan>> got(sources.size());
    std::vector<std::string> why(sources.size());
    parallel_for(sources.size(), ctx.jobs, [&](std::size_t i) {
        try {
            got[i] = solve_deterministic(ctx, ctx.horizon.apply(sources[i].traj)).plan;
        } catch (const SolverError& e) {
            why[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (got[i]) {
            ids.push_back(sources[i].id);
            plans.push_back(std::move(*got[i]));
        } else {
            spdlog::warn("candidate from window {} dropped: {}", sources[i].id, why[i]);
            dropped.push_back(sources[i].id);
        }
    }
    if (plans.empty()) throw SolverError("every candidate solve failed");
}

HeuristicResult select_over(const PlanningContext& ctx, const std::vector<WeatherWindow>& sources,
                            const std::vector<WeatherWindow>& evaluation) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> ids, dropped;
    std::vector<DispatchPlan> plans;
    build_candidates(ctx, sources, ids, plans, dropped);
    std::vector<WeatherTrajectory> eval;
    std::vector<std::string> eval_ids;
    for (const auto& w : evaluation) {
        eval.push_back(ctx.horizon.apply(w.traj));
        eval_ids.push_back(w.id);
    }
    HeuristicResult r;
    r.table = saa_select(std::move(ids), std::move(plans), std::move(eval_ids),
                         [&](const DispatchPlan& p, std::size_t j) { return simulated_profit(ctx, p, eval[j]); },
                         ctx.jobs);
    r.table.dropped = std::move(dropped);
    r.plan = r.table.plans[r.table.selected];
    r.source_id = r.table.candidate_ids[r.table.selected];
    r.seconds = seconds_since(t0);
    return r;
}

}  // namespace

HeuristicResult heuristic_1(const PlanningContext& ctx, const std::vector<WeatherWindow>& scenarios) {
    if (scenarios.empty()) throw ValidationError("heuristic 1 needs a non-empty scenario space");
    return select_over(ctx, scenarios, scenarios);
}

HeuristicResult heuristic_2(const PlanningContext& ctx, const std::vector<WeatherWindow>& sampling,
                            std::optional<std::size_t> subset_size) {
    if (sampling.empty()) throw ValidationError("heuristic 2 needs a non-empty sampling set");
    const std::size_t n = subset_size.value_or(sampling.size());
    if (n == 0 || n > sampling.size()) throw ValidationError("heuristic 2 subset size out of range");
    std::vector<WeatherWindow> recent = sampling;
    std::stable_sort(recent.begin(), recent.end(),
                     [](const WeatherWindow& a, const WeatherWindow& b) { return a.id > b.id; });
    recent.resize(n);
    std::sort(recent.begin(), recent.end(), [](const WeatherWindow& a, const WeatherWindow& b) { return a.id < b.id; });
    return select_over(ctx, recent, sampling);
}

Heuristic3Result heuristic_3(const PlanningContext& ctx, const std::vector<WeatherWindow>& sampling,
                             std::uint64_t seed) {
    if (sampling.empty()) throw ValidationError("heuristic 3 needs at least one sampling window");
    const auto t0 = std::chrono::steady_clock::now();
    const double dt = sampling.front().traj.dt_hours;
    const auto per_day = static_cast<std::size_t>(std::llround(24.0 / dt));
    std::vector<std::vector<double>> profiles;
    for (const auto& w : sampling) {
        if (w.traj.size() < per_day) throw ValidationError("window " + w.id + " is shorter than one day");
        std::vector<double> day(per_day);
        for (std::size_t i = 0; i < per_day; ++i) day[i] = w.traj.samples[i].dni;
        profiles.push_back(std::move(day));
    }
    const MedoidResult m = k_medoids(profiles, 1, 100, seed);
    const WeatherWindow& src = sampling[m.medoids.front()];

    WeatherTrajectory two_day;
    two_day.start_timestamp = src.traj.start_timestamp;
    two_day.dt_hours = dt;
    for (int rep = 0; rep < 2; ++rep)
        two_day.samples.insert(two_day.samples.end(), src.traj.samples.begin(),
                               src.traj.samples.begin() + static_cast<std::ptrdiff_t>(per_day));

    Heuristic3Result r;
    r.medoid_id = src.id;
    r.typical = ctx.horizon.apply(two_day);
    r.plan = solve_deterministic(ctx, r.typical).plan;
    r.seconds = seconds_since(t0);
    return r;
}

}  // namespace cst
