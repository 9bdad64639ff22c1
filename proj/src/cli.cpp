#include "cst/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cst/bench.hpp"
#include "cst/config.hpp"
#include "cst/errors.hpp"
#include "cst/heuristics.hpp"
#include "cst/manifest.hpp"
#include "cst/parallel.hpp"
#include "cst/sampling.hpp"

namespace cst {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Raised for command-line misuse that CLI11 itself cannot detect.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exit code 1 after the outputs were written (for example a time-limited solve).
struct SolverLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string now_stamp(const char* fmt) {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    localtime_r(&t, &tm);
    char buf[64];
    std::strftime(buf, sizeof buf, fmt, &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f << text;
    if (!f) throw IoError("failed writing " + path.string());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct GlobalOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_root;
    std::string run_dir;
    unsigned jobs = 0;
    std::string log_level = "info";
};

class Session {
public:
    Session(const GlobalOptions& g, std::string command, std::vector<std::string> argv)
        : command_(std::move(command)) {
        if (g.config_path.empty()) throw UsageError("--config is required");
        if (!fs::exists(g.config_path)) throw UsageError("config file not found: " + g.config_path);
        cfg = load_run_config(g.config_path, g.overrides);
        jobs = g.jobs ? g.jobs : default_jobs();
        if (!g.run_dir.empty()) {
            dir = g.run_dir;
        } else {
            const fs::path root = g.out_root.empty() ? cfg.output_dir : fs::path(g.out_root);
            const std::string base = now_stamp("%Y%m%d-%H%M%S") + "-" + command_;
            dir = root / base;
            for (int i = 2; fs::exists(dir); ++i) dir = root / (base + "-" + std::to_string(i));
        }
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create run directory " + dir.string() + ": " + ec.message());
        manifest_["command"] = command_;
        manifest_["argv"] = std::move(argv);
        manifest_["started"] = now_stamp("%Y-%m-%dT%H:%M:%S");
        manifest_["config_file"] = fs::absolute(g.config_path).string();
        manifest_["config"] = cfg.echo();
        manifest_["seeds"] = {{"sampling", cfg.sampling.seed},
                              {"heuristic_3", cfg.heuristics.h3_seed},
                              {"synthetic", cfg.synthetic.seed}};
        manifest_["jobs"] = jobs;
        manifest_["outputs"] = json::array();
    }

    fs::path output(const std::string& name, const std::string& text) {
        const fs::path p = dir / name;
        write_text(p, text);
        manifest_["outputs"].push_back(name);
        return p;
    }

    void note(const std::string& key, json value) { manifest_["details"][key] = std::move(value); }

    void finish(int code, const std::string& error = {}) {
        manifest_["finished"] = now_stamp("%Y-%m-%dT%H:%M:%S");
        manifest_["exit_code"] = code;
        if (!error.empty()) manifest_["error"] = error;
        try {
            write_text(dir / "run_manifest.json", manifest_.dump(2) + "\n");
        } catch (const std::exception& e) {
            spdlog::error("{}", e.what());
        }
    }

    RunConfig cfg;
    fs::path dir;
    unsigned jobs = 1;

private:
    std::string command_;
    json manifest_;
};

struct WeatherSets {
    std::vector<WeatherWindow> sampling;
    std::vector<WeatherWindow> testing;
    HistoryPartition partition;
    unsigned month = 1;
};

WeatherSets load_weather(const RunConfig& cfg, const ScenarioManifest* manifest) {
    const HistoryDatabase db = load_weather_csv(cfg.weather.csv, cfg.weather.schema);
    if (std::abs(db.dt_hours - cfg.horizon.dt_hours) > 1e-9)
        throw ConfigError("weather step (" + std::to_string(db.dt_hours) + " h) differs from horizon.dt_hours");
    WeatherSets w;
    w.month = manifest ? manifest->month : cfg.weather.month;
    const auto windows = build_two_day_windows(db, w.month);
    if (manifest && !(manifest->sampling_ids.empty() && manifest->testing_ids.empty()))
        w.partition = {manifest->sampling_ids, manifest->testing_ids};
    else
        w.partition = partition_history(windows, cfg.partition);
    w.sampling = select_windows(windows, w.partition.sampling_ids);
    w.testing = select_windows(windows, w.partition.testing_ids);
    return w;
}

DispatchPlan load_plan(const std::string& path, const RunConfig& cfg) {
    if (!fs::exists(path)) throw UsageError("plan file not found: " + path);
    std::ifstream f(path);
    if (!f) throw IoError("cannot read plan file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    DispatchPlan plan = plan_from_json(ss.str());
    if (plan.horizon() != cfg.horizon_length())
        throw UsageError("plan horizon " + std::to_string(plan.horizon()) + " does not match the configured horizon " +
                         std::to_string(cfg.horizon_length()));
    plan.validate(cfg.plant.design, nullptr, 1e-5);
    return plan;
}

// Runtime recorded by `optimize` next to a plan file, if any.
double planning_seconds_for(const std::string& plan_path) {
    const fs::path log = fs::path(plan_path).parent_path() / "solve_log.json";
    std::ifstream f(log);
    if (!f) return 0.0;
    try {
        return json::parse(f).value("total_seconds", 0.0);
    } catch (const json::exception&) {
        return 0.0;
    }
}

json profit_json(const ProfitBreakdown& p) {
    const ComponentValues c = components_of(p);
    return {{"revenue", c.revenue},
            {"purchase", c.purchase},
            {"receiver_cost", c.receiver_cost},
            {"pb_cost", c.pb_cost},
            {"profit", c.profit},
            {"detail",
             {{"receiver_opex", p.receiver_opex},
              {"receiver_shutdown", p.receiver_sd_cost},
              {"pb_opex", p.pb_opex},
              {"pb_shutdown", p.pb_sd_cost}}}};
}

json events_json(const EventCounts& e) {
    return {{"receiver_startups", e.rsup},     {"receiver_shutdowns_planned", e.rsd_planned},
            {"receiver_shutdowns_forced", e.rsd_forced}, {"pb_startups", e.csup},
            {"pb_shutdowns_planned", e.csd_planned}, {"pb_shutdowns_forced", e.csd_forced}};
}

std::string safe_name(std::string s) {
    for (char& c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    return s;
}

// ----------------------------------------------------------------- commands

struct SampleArgs {
    std::optional<unsigned> month;
    std::optional<std::size_t> n_s;
    std::optional<std::uint64_t> seed;
};

void cmd_sample(Session& s, const SampleArgs& a) {
    RunConfig& cfg = s.cfg;
    if (a.month) cfg.weather.month = *a.month;
    if (a.n_s) cfg.sampling.n_s = *a.n_s;
    if (a.seed) cfg.sampling.seed = *a.seed;
    if (cfg.weather.month < 1 || cfg.weather.month > 12) throw UsageError("--month must lie in 1..12");
    if (cfg.sampling.n_s == 0) throw UsageError("--n-s must be at least 1");
    const WeatherSets w = load_weather(cfg, nullptr);
    if (w.sampling.empty()) throw ValidationError("no sampling windows for the configured month and partition");
    const EnergyEcdf ecdf = build_ecdf(w.sampling, cfg.plant);
    const ScenarioSpace space = stratified_sample(ecdf, w.sampling, cfg.sampling.n_s, cfg.sampling.seed);
    const ScenarioManifest m = make_manifest(space, cfg.weather.month, cfg.horizon.dt_hours, w.partition);
    s.output("manifest.json", m.to_json().dump(2) + "\n");
    s.output("ecdf.csv", ecdf_csv(ecdf));
    s.note("sample", {{"month", cfg.weather.month},
                      {"n_s", cfg.sampling.n_s},
                      {"seed", cfg.sampling.seed},
                      {"sampling_windows", w.sampling.size()},
                      {"testing_windows", w.testing.size()},
                      {"scenarios", space.ids()}});
    spdlog::info("sampled {} scenarios from {} windows", space.n_s(), w.sampling.size());
}

struct OptimizeArgs {
    std::string manifest;
    std::string mode = "smilp";
    std::string scenario;
};

int cmd_optimize(Session& s, const OptimizeArgs& a) {
    const RunConfig& cfg = s.cfg;
    const PlanningContext ctx = s.cfg.context(s.jobs);
    std::optional<ScenarioManifest> manifest;
    if (!a.manifest.empty()) {
        if (!fs::exists(a.manifest)) throw UsageError("manifest not found: " + a.manifest);
        manifest = read_manifest(a.manifest);
    }
    json log;
    log["mode"] = a.mode;
    const auto t0 = std::chrono::steady_clock::now();
    std::optional<DispatchPlan> plan;
    SolveStatus status = SolveStatus::Optimal;

    if (a.mode == "smilp" || a.mode == "deterministic") {
        if (!manifest) throw UsageError("--manifest is required for mode " + a.mode);
        std::vector<WeatherWindow> scen = manifest->scenario_windows();
        if (a.mode == "deterministic") {
            auto it = scen.begin();
            if (!a.scenario.empty()) {
                it = std::find_if(scen.begin(), scen.end(), [&](const WeatherWindow& w) { return w.id == a.scenario; });
                if (it == scen.end()) throw UsageError("scenario " + a.scenario + " is not in the manifest");
            }
            scen = {*it};
        }
        std::vector<WeatherTrajectory> trajs;
        std::vector<std::string> ids;
        for (const auto& w : scen) {
            trajs.push_back(ctx.horizon.apply(w.traj));
            ids.push_back(w.id);
        }
        const auto tb = std::chrono::steady_clock::now();
        ModelOptions mo = ctx.model;
        mo.name = a.mode == "smilp" ? "smilp" : "deterministic";
        const Formulation f = build_smilp(ctx.plant, ctx.costs, trajs, ctx.prices, mo);
        const double build_s = seconds_since(tb);
        s.output("model.mps", write_mps(f.model));
        s.output("index_map.json", f.index.to_json(f.model));
        OptimizeResult r = optimize(f, ctx.solver, ctx.polish);
        status = r.solution.status;
        log["status"] = to_string(status);
        log["message"] = r.solution.message;
        log["variables"] = f.model.variables().size();
        log["rows"] = f.model.rows().size();
        log["build_seconds"] = build_s;
        log["solve_seconds"] = r.solve_seconds;
        log["polished"] = r.polished;
        if (r.solution.has_values()) {
            log["objective"] = r.solution.objective_value;
            log["mip_gap"] = r.solution.mip_gap;
            const auto per = scenario_objectives(r.solution, f);
            json sc = json::object();
            for (std::size_t i = 0; i < ids.size(); ++i) {
                json entry = {{"milp_profit", per[i]}};
                if (r.plan)
                    entry["simulated_profit"] = simulated_profit(ctx, *r.plan, trajs[i]);
                sc[ids[i]] = entry;
            }
            log["scenarios"] = sc;
        }
        plan = r.plan;
    } else if (a.mode == "h1") {
        if (!manifest) throw UsageError("--manifest is required for mode h1");
        const HeuristicResult h = heuristic_1(ctx, manifest->scenario_windows());
        s.output("candidates.csv", h.table.to_csv());
        log["selected_window"] = h.source_id;
        log["dropped"] = h.table.dropped;
        log["selected_mean_profit"] = h.table.means[h.table.selected];
        plan = h.plan;
    } else if (a.mode == "h2") {
        const WeatherSets w = load_weather(cfg, manifest ? &*manifest : nullptr);
        const HeuristicResult h = heuristic_2(ctx, w.sampling, cfg.heuristics.h2_subset);
        s.output("candidates.csv", h.table.to_csv());
        log["selected_window"] = h.source_id;
        log["dropped"] = h.table.dropped;
        log["selected_mean_profit"] = h.table.means[h.table.selected];
        log["candidates"] = h.table.candidate_ids.size();
        plan = h.plan;
    } else if (a.mode == "h3") {
        const WeatherSets w = load_weather(cfg, manifest ? &*manifest : nullptr);
        const Heuristic3Result h = heuristic_3(ctx, w.sampling, cfg.heuristics.h3_seed);
        log["medoid_window"] = h.medoid_id;
        plan = h.plan;
    } else {
        throw UsageError("unknown optimize mode '" + a.mode + "'");
    }
    log["total_seconds"] = seconds_since(t0);
    if (plan) s.output("plan.json", plan_to_json(*plan));
    s.output("solve_log.json", log.dump(2) + "\n");
    s.note("optimize", log);
    if (!plan) throw SolverError("no plan: solver status " + to_string(status));
    if (status == SolveStatus::TimeLimit) throw SolverLimit("solver stopped at its time limit; plan written");
    spdlog::info("plan written to {}", (s.dir / "plan.json").string());
    return kExitOk;
}

struct SimulateArgs {
    std::string plan;
    std::string manifest;
    std::string scenario;
    std::string category;
    std::string window;
};

void cmd_simulate(Session& s, const SimulateArgs& a) {
    const RunConfig& cfg = s.cfg;
    const DispatchPlan plan = load_plan(a.plan, cfg);
    const PlanningContext ctx = cfg.context(s.jobs);
    std::vector<WeatherWindow> targets;
    if (!a.manifest.empty()) {
        if (!fs::exists(a.manifest)) throw UsageError("manifest not found: " + a.manifest);
        const ScenarioManifest m = read_manifest(a.manifest);
        for (auto& w : m.scenario_windows())
            if (a.scenario.empty() || w.id == a.scenario) targets.push_back(w);
        if (targets.empty()) throw UsageError("scenario " + a.scenario + " is not in the manifest");
    } else if (!a.category.empty() || !a.window.empty()) {
        const WeatherSets w = load_weather(cfg, nullptr);
        if (!a.window.empty()) {
            for (const auto* set : {&w.sampling, &w.testing})
                for (const auto& x : *set)
                    if (x.id == a.window) targets.push_back(x);
            if (targets.empty()) throw UsageError("window " + a.window + " not found in the configured month");
        } else if (a.category == "sampling") {
            targets = w.sampling;
        } else if (a.category == "testing") {
            targets = w.testing;
        } else {
            throw UsageError("--category must be sampling or testing when no manifest is given");
        }
    } else {
        throw UsageError("choose weather with --manifest, --category or --window");
    }

    json out;
    out["plan"] = fs::absolute(a.plan).string();
    out["trajectories"] = json::object();
    std::vector<SimulationResult> results(targets.size());
    parallel_for(targets.size(), s.jobs, [&](std::size_t i) {
        results[i] = simulate(cfg.plant, cfg.costs, plan, ctx.horizon.apply(targets[i].traj), ctx.prices,
                              ctx.sim_options());
    });
    double total = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& r = results[i];
        s.output("trace_" + safe_name(targets[i].id) + ".csv", trace_csv(r));
        out["trajectories"][targets[i].id] = {{"profit", profit_json(r.profit)},
                                              {"events", events_json(r.events)},
                                              {"dispatched_mwh", r.dispatched_mwh},
                                              {"sales_value", r.sales_value}};
        total += r.profit.profit;
    }
    out["mean_profit"] = targets.empty() ? 0.0 : total / static_cast<double>(targets.size());
    s.output("profit.json", out.dump(2) + "\n");
    spdlog::info("simulated {} trajectories, mean profit {:.2f}", targets.size(), out["mean_profit"].get<double>());
}

struct BenchArgs {
    std::vector<std::string> plans;  // NAME=PATH or PATH
    bool pk = false;
    std::string category;
    std::string manifest;
};

void cmd_bench(Session& s, const BenchArgs& a) {
    const RunConfig& cfg = s.cfg;
    if (a.category != "scenario" && a.category != "sampling" && a.category != "testing")
        throw UsageError("unknown category '" + a.category + "' (expected scenario, sampling or testing)");
    if (a.plans.empty() && !a.pk) throw UsageError("bench needs at least one --plan or --pk");
    std::optional<ScenarioManifest> manifest;
    if (!a.manifest.empty()) {
        if (!fs::exists(a.manifest)) throw UsageError("manifest not found: " + a.manifest);
        manifest = read_manifest(a.manifest);
    }
    std::vector<WeatherWindow> windows;
    if (a.category == "scenario") {
        if (!manifest) throw UsageError("category scenario needs --manifest");
        windows = manifest->scenario_windows();
    } else {
        const WeatherSets w = load_weather(cfg, manifest ? &*manifest : nullptr);
        windows = a.category == "sampling" ? w.sampling : w.testing;
    }
    if (windows.empty()) throw ValidationError("the " + a.category + " weather set is empty");

    const PlanningContext ctx = cfg.context(s.jobs);
    std::vector<PlanEvaluation> evals;
    for (const auto& spec : a.plans) {
        const auto eq = spec.find('=');
        const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
        std::string name = eq == std::string::npos ? fs::path(spec).parent_path().filename().string() : spec.substr(0, eq);
        if (name.empty()) name = "plan" + std::to_string(evals.size() + 1);
        PlanEvaluation ev{PlanSource::fixed_plan(name, load_plan(path, cfg)), {}, planning_seconds_for(path)};
        ev.records = evaluate_plan(ctx, ev.source, windows);
        evals.push_back(std::move(ev));
    }
    if (a.pk) {
        PlanEvaluation ev{PlanSource::perfect_knowledge(), {}, 0.0};
        ev.records = evaluate_plan(ctx, ev.source, windows);
        evals.push_back(std::move(ev));
    }
    const EvaluationReport rep = build_report(a.category, evals);
    json j = rep.to_json();
    j["currency"] = cfg.prices.currency;
    s.output("report.json", j.dump(2) + "\n");
    s.output("report.txt", rep.to_text());
    s.output("report.csv", rep.to_csv());
    s.output("report.svg", rep.to_svg());
    s.note("component_identity_error", rep.component_identity_error());
    std::cout << rep.to_text();
}

struct SensitivityArgs {
    std::vector<std::size_t> sizes;
    std::string manifest;
};

void cmd_sensitivity(Session& s, const SensitivityArgs& a) {
    const RunConfig& cfg = s.cfg;
    std::optional<ScenarioManifest> manifest;
    if (!a.manifest.empty()) {
        if (!fs::exists(a.manifest)) throw UsageError("manifest not found: " + a.manifest);
        manifest = read_manifest(a.manifest);
    }
    const WeatherSets w = load_weather(cfg, manifest ? &*manifest : nullptr);
    const auto sizes = a.sizes.empty() ? cfg.heuristics.sensitivity_sizes : a.sizes;
    const auto rows = sensitivity_h2(cfg.context(s.jobs), w.sampling, w.testing, sizes);
    s.output("sweep.csv", sensitivity_csv(rows));
    s.output("sweep.svg", sensitivity_svg(rows));
    std::cout << sensitivity_csv(rows);
}

void cmd_synth(Session& s, const std::string& csv_out) {
    const RunConfig& cfg = s.cfg;
    const auto db = synthetic_month_history(cfg.synthetic.seed, cfg.synthetic.first_year, cfg.synthetic.last_year,
                                            cfg.weather.month, cfg.synthetic.sky, cfg.synthetic.dropout);
    const fs::path target = csv_out.empty() ? s.dir / "synthetic_weather.csv" : fs::path(csv_out);
    write_weather_csv(db, target, cfg.weather.schema);
    s.note("synth", {{"csv", target.string()}, {"days", db.days.size()}});
    spdlog::info("wrote {} days of synthetic weather to {}", db.days.size(), target.string());
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Dispatch planning for a solar thermal plant with storage"};
    app.require_subcommand(1);
    GlobalOptions g;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", g.config_path, "JSON run configuration")->required();
        sub->add_option("--set", g.overrides, "Config override key.path=value (repeatable)");
        sub->add_option("--out", g.out_root, "Root directory for run folders (default: config output_dir)");
        sub->add_option("--run-dir", g.run_dir, "Exact run directory to write into");
        sub->add_option("-j,--jobs", g.jobs, "Worker threads (default: logical cores)");
        sub->add_option("--log-level", g.log_level, "trace|debug|info|warn|error|off");
    };

    SampleArgs sa;
    auto* sample = app.add_subcommand("sample", "Draw a stratified scenario space");
    add_common(sample);
    sample->add_option("--month", sa.month, "Calendar month 1..12");
    sample->add_option("--n-s", sa.n_s, "Number of scenarios");
    sample->add_option("--seed", sa.seed, "Sampling seed");

    OptimizeArgs oa;
    auto* opt = app.add_subcommand("optimize", "Solve for a dispatch plan");
    add_common(opt);
    opt->add_option("-m,--manifest", oa.manifest, "Scenario manifest from `sample`");
    opt->add_option("--mode", oa.mode, "smilp | deterministic | h1 | h2 | h3")
        ->check(CLI::IsMember({"smilp", "deterministic", "h1", "h2", "h3"}));
    opt->add_option("--scenario", oa.scenario, "Window id for deterministic mode (default: first scenario)");

    SimulateArgs sm;
    auto* sim = app.add_subcommand("simulate", "Apply a plan to weather trajectories");
    add_common(sim);
    sim->add_option("-p,--plan", sm.plan, "Plan JSON file")->required();
    sim->add_option("-m,--manifest", sm.manifest, "Simulate on the manifest's scenarios");
    sim->add_option("--scenario", sm.scenario, "Restrict to one manifest scenario");
    sim->add_option("--category", sm.category, "sampling | testing (weather from the config)");
    sim->add_option("--window", sm.window, "Single window id from the configured weather");

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Evaluate plans over a weather category");
    add_common(bench);
    bench->add_option("-p,--plan", ba.plans, "NAME=PATH of a plan file (repeatable)");
    bench->add_flag("--pk", ba.pk, "Include the perfect-knowledge benchmark");
    bench->add_option("--category", ba.category, "scenario | sampling | testing")->required();
    bench->add_option("-m,--manifest", ba.manifest, "Scenario manifest (required for category scenario)");

    SensitivityArgs se;
    auto* sens = app.add_subcommand("sensitivity", "Heuristic-2 subset-size sweep");
    add_common(sens);
    sens->add_option("--sizes", se.sizes, "Subset sizes, ascending")->delimiter(',');
    sens->add_option("-m,--manifest", se.manifest, "Reuse the manifest's sampling/testing split");

    std::string synth_csv;
    auto* synth = app.add_subcommand("synth", "Write synthetic weather for the configured month");
    add_common(synth);
    synth->add_option("--csv", synth_csv, "Output CSV path (default: inside the run directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const auto level = spdlog::level::from_str(g.log_level);
    spdlog::set_level(level);
    spdlog::set_default_logger(spdlog::default_logger());

    CLI::App* chosen = app.get_subcommands().front();
    std::vector<std::string> args(argv, argv + argc);
    std::unique_ptr<Session> session;
    auto fail = [&](int code, const std::string& msg) {
        std::cerr << "error: " << msg << "\n";
        if (session) session->finish(code, msg);
        return code;
    };
    try {
        session = std::make_unique<Session>(g, chosen->get_name(), args);
        int code = kExitOk;
        const std::string name = chosen->get_name();
        if (name == "sample") cmd_sample(*session, sa);
        else if (name == "optimize") code = cmd_optimize(*session, oa);
        else if (name == "simulate") cmd_simulate(*session, sm);
        else if (name == "bench") cmd_bench(*session, ba);
        else if (name == "sensitivity") cmd_sensitivity(*session, se);
        else if (name == "synth") cmd_synth(*session, synth_csv);
        session->finish(code);
        std::cout << "run directory: " << session->dir.string() << "\n";
        return code;
    } catch (const UsageError& e) {
        return fail(kExitUsage, e.what());
    } catch (const ConfigError& e) {
        return fail(kExitUsage, e.what());
    } catch (const ValidationError& e) {
        return fail(kExitUsage, e.what());
    } catch (const IoError& e) {
        return fail(kExitIo, e.what());
    } catch (const SolverLimit& e) {
        return fail(kExitSolver, e.what());
    } catch (const SolverError& e) {
        return fail(kExitSolver, e.what());
    } catch (const std::exception& e) {
        return fail(kExitSolver, std::string("unexpected failure: ") + e.what());
    }
}

}  // namespace cst
