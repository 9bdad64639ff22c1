// Stand-alone MPS solver behind the external-backend contract:
//   cst_mps_solve MODEL.mps SOLUTION.txt [--time-limit s] [--mip-gap g] [--threads n]
// Writes the solution file read by cst::read_solution_file.

#include <cmath>
#include <iostream>

#include <CLI11.hpp>

#include "Highs.h"
#include "cst/milp.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Solve an MPS model with HiGHS and write a cst solution file"};
    std::string mps, out;
    double time_limit = 3600.0, gap = 0.005;
    int threads = 1;
    bool verbose = false;
    app.add_option("model", mps, "MPS file")->required()->check(CLI::ExistingFile);
    app.add_option("solution", out, "Solution file to write")->required();
    app.add_option("--time-limit", time_limit);
    app.add_option("--mip-gap", gap);
    app.add_option("--threads", threads);
    app.add_flag("-v,--verbose", verbose);
    CLI11_PARSE(app, argc, argv);

    Highs h;
    h.setOptionValue("output_flag", verbose);
    h.setOptionValue("time_limit", time_limit);
    h.setOptionValue("mip_rel_gap", gap);
    h.setOptionValue("threads", static_cast<HighsInt>(threads));
    h.setOptionValue("random_seed", static_cast<HighsInt>(0));
    h.setOptionValue("mip_feasibility_tolerance", 1e-9);
    h.setOptionValue("primal_feasibility_tolerance", 1e-9);
    if (h.readModel(mps) == HighsStatus::kError) {
        std::cerr << "cannot read " << mps << "\n";
        return 3;
    }
    h.run();

    cst::SolutionFile sol;
    const auto& info = h.getInfo();
    const bool incumbent = info.primal_solution_status == kSolutionStatusFeasible;
    switch (h.getModelStatus()) {
        case HighsModelStatus::kOptimal: sol.status = cst::SolveStatus::Optimal; break;
        case HighsModelStatus::kInfeasible:
        case HighsModelStatus::kUnboundedOrInfeasible: sol.status = cst::SolveStatus::Infeasible; break;
        case HighsModelStatus::kUnbounded: sol.status = cst::SolveStatus::Unbounded; break;
        case HighsModelStatus::kTimeLimit: sol.status = cst::SolveStatus::TimeLimit; break;
        default: sol.status = incumbent ? cst::SolveStatus::FeasibleGap : cst::SolveStatus::SolverError;
    }
    sol.mip_gap = std::isfinite(info.mip_gap) ? info.mip_gap : 0.0;
    std::vector<std::string> order;
    if (incumbent) {
        sol.objective = info.objective_function_value;
        const auto& names = h.getLp().col_names_;
        const auto& x = h.getSolution().col_value;
        for (std::size_t j = 0; j < names.size() && j < x.size(); ++j) {
            sol.values[names[j]] = x[j];
            order.push_back(names[j]);
        }
    }
    try {
        cst::write_solution_file(out, sol, order);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
    return 0;
}
