#include <cmath>

#include "Highs.h"
#include "cst/milp.hpp"

namespace cst {
namespace {

HighsModel to_highs(const MilpModel& m) {
    HighsModel hm;
    HighsLp& lp = hm.lp_;
    const auto& vars = m.variables();
    const auto& rows = m.rows();
    lp.num_col_ = static_cast<HighsInt>(vars.size());
    lp.num_row_ = static_cast<HighsInt>(rows.size());
    lp.sense_ = m.sense() == cst::ObjSense::Maximize ? ::ObjSense::kMaximize : ::ObjSense::kMinimize;
    lp.offset_ = m.objective_constant();
    lp.col_cost_ = m.objective();
    bool any_int = false;
    for (const auto& v : vars) {
        lp.col_lower_.push_back(v.lb == -kInf ? -kHighsInf : v.lb);
        lp.col_upper_.push_back(v.ub == kInf ? kHighsInf : v.ub);
        const bool is_int = v.kind == VarKind::Binary;
        any_int |= is_int;
        lp.integrality_.push_back(is_int ? HighsVarType::kInteger : HighsVarType::kContinuous);
    }
    if (!any_int) lp.integrality_.clear();
    for (const auto& r : rows) {
        lp.row_lower_.push_back(r.sense == RowSense::Le ? -kHighsInf : r.rhs);
        lp.row_upper_.push_back(r.sense == RowSense::Ge ? kHighsInf : r.rhs);
    }
    std::vector<std::vector<std::pair<HighsInt, double>>> cols(vars.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto& t : rows[i].terms) cols[t.var].push_back({static_cast<HighsInt>(i), t.coef});
    auto& a = lp.a_matrix_;
    a.format_ = MatrixFormat::kColwise;
    a.num_col_ = lp.num_col_;
    a.num_row_ = lp.num_row_;
    // The matrix default-constructs with start_ = {0}; reset it explicitly.
    a.start_.assign(1, 0);
    a.index_.clear();
    a.value_.clear();
    for (const auto& c : cols) {
        for (const auto& [i, v] : c) {
            a.index_.push_back(i);
            a.value_.push_back(v);
        }
        a.start_.push_back(static_cast<HighsInt>(a.index_.size()));
    }
    return hm;
}

void configure(Highs& h, const SolverConfig& cfg, bool presolve) {
    h.setOptionValue("output_flag", cfg.verbose);
    h.setOptionValue("time_limit", cfg.time_limit_s);
    h.setOptionValue("mip_rel_gap", cfg.mip_gap_target);
    h.setOptionValue("threads", static_cast<HighsInt>(cfg.threads));
    h.setOptionValue("random_seed", static_cast<HighsInt>(0));
    // Big-M rows multiply binaries by up to a few thousand; a loose
    // integrality tolerance would blur the strictness slack.
    h.setOptionValue("mip_feasibility_tolerance", 1e-9);
    h.setOptionValue("primal_feasibility_tolerance", 1e-9);
    if (!presolve) h.setOptionValue("presolve", "off");
}

}  // namespace

Solution solve_with_highs(const MilpModel& model, const SolverConfig& cfg) {
    const HighsModel hm = to_highs(model);
    Solution sol;
    for (int attempt = 0; attempt < 2; ++attempt) {
        Highs h;
        configure(h, cfg, attempt == 0);
        if (h.passModel(hm) == HighsStatus::kError) {
            sol.message = "HiGHS rejected the model";
            return sol;
        }
        h.run();
        const auto status = h.getModelStatus();
        const auto& info = h.getInfo();
        const bool incumbent = info.primal_solution_status == kSolutionStatusFeasible;
        // Presolve sometimes cannot tell infeasible from unbounded; one retry
        // without it settles the question.
        if (status == HighsModelStatus::kUnboundedOrInfeasible && attempt == 0) continue;
        sol.mip_gap = model.variables().empty() || hm.lp_.integrality_.empty() ? 0.0 : info.mip_gap;
        if (!std::isfinite(sol.mip_gap)) sol.mip_gap = 0.0;
        switch (status) {
            case HighsModelStatus::kOptimal: sol.status = SolveStatus::Optimal; break;
            case HighsModelStatus::kInfeasible:
            case HighsModelStatus::kUnboundedOrInfeasible: sol.status = SolveStatus::Infeasible; break;
            case HighsModelStatus::kUnbounded: sol.status = SolveStatus::Unbounded; break;
            case HighsModelStatus::kTimeLimit: sol.status = SolveStatus::TimeLimit; break;
            case HighsModelStatus::kIterationLimit:
            case HighsModelStatus::kSolutionLimit:
            case HighsModelStatus::kInterrupt:
            case HighsModelStatus::kObjectiveBound:
            case HighsModelStatus::kObjectiveTarget:
                sol.status = incumbent ? SolveStatus::FeasibleGap : SolveStatus::SolverError;
                break;
            default:
                sol.status = SolveStatus::SolverError;
                sol.message = "HiGHS status: " + h.modelStatusToString(status);
        }
        const bool keep = sol.status == SolveStatus::Optimal || sol.status == SolveStatus::FeasibleGap ||
                          (sol.status == SolveStatus::TimeLimit && incumbent);
        if (keep) {
            sol.values = h.getSolution().col_value;
            sol.objective_value = info.objective_function_value;
        }
        break;
    }
    return sol;
}

}  // namespace cst
