#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cst/bench.hpp"
#include "cst/cli.hpp"
#include "cst/config.hpp"
#include "cst/errors.hpp"
#include "cst/heuristics.hpp"
#include "cst/manifest.hpp"
#include "cst/milp.hpp"
#include "cst/sampling.hpp"
#include "cst/simulator.hpp"

namespace py = pybind11;
using json = nlohmann::json;

namespace {

// JSON crosses the boundary as text; the Python side wraps it with json.loads.
cst::WeatherTrajectory trajectory_from_text(const std::string& text) {
    try {
        return cst::trajectory_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
        throw cst::ValidationError(std::string("trajectory is not valid JSON: ") + e.what());
    }
}

cst::RunConfig config_from(const std::string& path, const std::vector<std::string>& overrides) {
    return cst::load_run_config(path, overrides);
}

py::dict summary_dict(const cst::PercentileSummary& s) {
    py::dict d;
    d["mean"] = s.mean;
    d["median"] = s.median;
    d["p2_5"] = s.p025;
    d["p97_5"] = s.p975;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dispatch planning core: configuration, optimisation, simulation and statistics";

    py::register_exception<cst::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<cst::ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<cst::IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<cst::SolverError>(m, "SolverError", PyExc_RuntimeError);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> owned{"cstdispatch"};
            owned.insert(owned.end(), args.begin(), args.end());
            std::vector<const char*> argv;
            for (const auto& a : owned) argv.push_back(a.c_str());
            py::gil_scoped_release release;
            return cst::run_cli(static_cast<int>(argv.size()), argv.data());
        },
        py::arg("args"), "Run a command-line invocation in-process and return its exit code.");

    m.def(
        "config_echo",
        [](const std::string& path, const std::vector<std::string>& overrides) {
            return config_from(path, overrides).echo().dump();
        },
        py::arg("path"), py::arg("overrides") = std::vector<std::string>{},
        "Resolved configuration as JSON text, each value tagged with its source.");

    m.def(
        "solve_deterministic",
        [](const std::string& config_path, const std::string& trajectory, const std::vector<std::string>& overrides) {
            const auto cfg = config_from(config_path, overrides);
            const auto ctx = cfg.context(1);
            const auto traj = ctx.horizon.apply(trajectory_from_text(trajectory));
            cst::PlanOutcome out;
            {
                py::gil_scoped_release release;
                out = cst::solve_deterministic(ctx, traj);
            }
            py::dict d;
            d["plan"] = cst::plan_to_json(out.plan);
            d["status"] = cst::to_string(out.status);
            d["objective"] = out.objective;
            d["mip_gap"] = out.mip_gap;
            d["seconds"] = out.seconds;
            return d;
        },
        py::arg("config_path"), py::arg("trajectory"), py::arg("overrides") = std::vector<std::string>{},
        "Optimise a plan for one two-day trajectory given as manifest JSON text.");

    m.def(
        "simulate",
        [](const std::string& config_path, const std::string& plan, const std::string& trajectory,
           const std::vector<std::string>& overrides) {
            const auto cfg = config_from(config_path, overrides);
            const auto ctx = cfg.context(1);
            const auto p = cst::plan_from_json(plan);
            const auto traj = ctx.horizon.apply(trajectory_from_text(trajectory));
            const auto r = cst::simulate(ctx.plant, ctx.costs, p, traj, ctx.prices, ctx.sim_options());
            const auto c = cst::components_of(r.profit);
            py::dict d;
            d["profit"] = c.profit;
            d["revenue"] = c.revenue;
            d["purchase"] = c.purchase;
            d["receiver_cost"] = c.receiver_cost;
            d["pb_cost"] = c.pb_cost;
            d["dispatched_mwh"] = r.dispatched_mwh;
            d["forced_receiver_shutdowns"] = r.events.rsd_forced;
            d["forced_pb_shutdowns"] = r.events.csd_forced;
            d["trace_csv"] = cst::trace_csv(r);
            return d;
        },
        py::arg("config_path"), py::arg("plan"), py::arg("trajectory"), py::arg("overrides") = std::vector<std::string>{},
        "Apply a plan (JSON text) to a two-day trajectory (manifest JSON text).");

    m.def(
        "welch_t_test",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            const auto r = cst::welch_t_test(a, b);
            py::dict d;
            d["t"] = r.t;
            d["dof"] = r.dof;
            d["p_value"] = r.p_value;
            return d;
        },
        py::arg("a"), py::arg("b"));

    m.def("percentile", &cst::percentile, py::arg("values"), py::arg("p"));
    m.def(
        "percentile_summary", [](const std::vector<double>& v) { return summary_dict(cst::percentile_summary(v)); },
        py::arg("values"));

    m.def(
        "equal_count_strata",
        [](std::size_t n, std::size_t n_s) {
            std::vector<std::pair<std::size_t, std::size_t>> out;
            for (const auto& s : cst::equal_count_strata(n, n_s)) out.emplace_back(s.first, s.last);
            return out;
        },
        py::arg("n"), py::arg("n_s"), "Inclusive rank ranges of equal-count strata.");

    m.def(
        "k_medoids",
        [](const std::vector<std::vector<double>>& points, std::size_t k, std::size_t max_iter, std::uint64_t seed) {
            const auto r = cst::k_medoids(points, k, max_iter, seed);
            py::dict d;
            d["medoids"] = r.medoids;
            d["assignment"] = r.assignment;
            d["cost"] = r.cost;
            return d;
        },
        py::arg("points"), py::arg("k"), py::arg("max_iter") = 100, py::arg("seed") = 0);

    m.def("format_mps_number", &cst::format_mps_number, py::arg("x"));
}
