#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cst/errors.hpp"
#include "cst/milp.hpp"

extern char** environ;

namespace cst {

Solution solve_with_highs(const MilpModel& model, const SolverConfig& config);

namespace {

namespace fs = std::filesystem;

std::optional<fs::path> find_on_path(const std::string& exe) {
    if (exe.find('/') != std::string::npos) {
        if (::access(exe.c_str(), X_OK) == 0) return fs::path(exe);
        return std::nullopt;
    }
    const char* path = std::getenv("PATH");
    if (!path) return std::nullopt;
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        if (dir.empty()) continue;
        fs::path candidate = fs::path(dir) / exe;
        if (::access(candidate.c_str(), X_OK) == 0) return candidate;
    }
    return std::nullopt;
}

fs::path resolve_executable(const SolverConfig& cfg, const char* env_var, const std::string& fallback) {
    std::string wanted = cfg.executable;
    if (wanted.empty()) {
        if (const char* env = std::getenv(env_var); env && *env) wanted = env;
    }
    if (wanted.empty()) wanted = fallback;
    if (auto p = find_on_path(wanted)) return *p;
    throw SolverError("solver backend '" + cfg.backend + "' needs the executable '" + wanted +
                      "'; install it, put it on PATH, or set " + env_var + " / solver.executable");
}

struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<unsigned> counter{0};
        path = fs::temp_directory_path() /
               ("cst_solve_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int run_process(const std::vector<std::string>& args, const fs::path& log) {
    std::vector<char*> argv;
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, 1, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_adddup2(&actions, 1, 2);
    pid_t pid;
    const int rc = posix_spawn(&pid, argv[0], &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) throw SolverError("failed to launch " + args[0]);
    int status = 0;
    while (waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR) throw SolverError("waitpid failed for " + args[0]);
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

double objective_of(const MilpModel& m, const std::vector<double>& x) {
    double v = m.objective_constant();
    for (std::size_t j = 0; j < x.size(); ++j) v += m.objective()[j] * x[j];
    return v;
}

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

Solution from_named(const MilpModel& m, SolveStatus status, const std::unordered_map<std::string, double>& named,
                    double gap) {
    Solution sol;
    sol.status = status;
    sol.mip_gap = gap;
    if (status == SolveStatus::Optimal || status == SolveStatus::FeasibleGap || status == SolveStatus::TimeLimit) {
        if (!named.empty() || m.num_vars() == 0) {
            sol.values.assign(m.num_vars(), 0.0);
            for (std::size_t j = 0; j < m.num_vars(); ++j) {
                const auto it = named.find(m.variables()[j].name);
                if (it != named.end()) sol.values[j] = it->second;
            }
            sol.objective_value = objective_of(m, sol.values);
        }
    }
    return sol;
}

Solution solve_external(const MilpModel& model, const SolverConfig& cfg) {
    const auto exe = resolve_executable(cfg, "CST_SOLVER_BIN", "cst_mps_solve");
    TempDir tmp;
    const auto mps = tmp.path / "model.mps";
    const auto sol_path = tmp.path / "solution.txt";
    write_mps_file(model, mps);
    const int rc = run_process({exe.string(), mps.string(), sol_path.string(), "--time-limit", fmt(cfg.time_limit_s),
                                "--mip-gap", fmt(cfg.mip_gap_target), "--threads", std::to_string(cfg.threads)},
                               tmp.path / "solver.log");
    if (rc != 0 || !fs::exists(sol_path)) {
        Solution s;
        s.message = "external solver exited with code " + std::to_string(rc) + ": " + slurp(tmp.path / "solver.log");
        return s;
    }
    const auto file = read_solution_file(sol_path);
    return from_named(model, file.status, file.values, file.mip_gap);
}

Solution solve_cbc(const MilpModel& model, const SolverConfig& cfg) {
    const auto exe = resolve_executable(cfg, "CST_CBC_BIN", "cbc");
    TempDir tmp;
    const auto mps = tmp.path / "model.mps";
    const auto sol_path = tmp.path / "solution.txt";
    write_mps_file(model, mps);
    // CBC ignores OBJSENSE in free MPS, so the sense is passed explicitly.
    std::vector<std::string> args{exe.string(), mps.string(),
                                  model.sense() == ObjSense::Maximize ? "-max" : "-min",
                                  "-sec", fmt(cfg.time_limit_s), "-ratioGap", fmt(cfg.mip_gap_target),
                                  "-threads", std::to_string(cfg.threads), "-primalTolerance", "1e-9",
                                  "-integerTolerance", "1e-9", "-solve", "-printingOptions", "all",
                                  "-solution", sol_path.string()};
    const int rc = run_process(args, tmp.path / "solver.log");
    if (!fs::exists(sol_path)) {
        Solution s;
        s.message = "cbc exited with code " + std::to_string(rc) + " and wrote no solution";
        return s;
    }
    std::ifstream in(sol_path);
    std::string header;
    std::getline(in, header);
    SolveStatus status = SolveStatus::SolverError;
    if (header.find("Optimal") != std::string::npos) status = SolveStatus::Optimal;
    else if (header.find("nfeasible") != std::string::npos) status = SolveStatus::Infeasible;
    else if (header.find("nbounded") != std::string::npos) status = SolveStatus::Unbounded;
    else if (header.find("Stopped") != std::string::npos) status = SolveStatus::TimeLimit;
    std::unordered_map<std::string, double> named;
    if (status != SolveStatus::Infeasible && status != SolveStatus::Unbounded) {
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string tok, name;
            double value;
            ls >> tok;
            if (tok == "**") ls >> tok;
            if (!(ls >> name >> value)) continue;
            named[name] = value;
        }
    }
    if (status == SolveStatus::TimeLimit && named.empty()) status = SolveStatus::TimeLimit;
    auto sol = from_named(model, status, named, 0.0);
    sol.message = header;
    return sol;
}

void round_binaries(const MilpModel& m, const SolverConfig& cfg, Solution& sol) {
    if (!sol.has_values()) return;
    for (std::size_t j = 0; j < m.num_vars(); ++j) {
        if (m.variables()[j].kind != VarKind::Binary) continue;
        const double v = sol.values[j];
        const double r = std::round(v);
        if (std::abs(v - r) > cfg.binary_integrality_tolerance) {
            sol.status = SolveStatus::SolverError;
            sol.message = "binary " + m.variables()[j].name + " = " + fmt(v) + " violates the integrality tolerance";
            sol.values.clear();
            return;
        }
        sol.values[j] = r;
    }
}

}  // namespace

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::FeasibleGap: return "feasible_gap";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::TimeLimit: return "time_limit";
        case SolveStatus::SolverError: return "solver_error";
    }
    return "solver_error";
}

SolveStatus solve_status_from_string(std::string_view s) {
    for (auto st : {SolveStatus::Optimal, SolveStatus::FeasibleGap, SolveStatus::Infeasible, SolveStatus::Unbounded,
                    SolveStatus::TimeLimit, SolveStatus::SolverError})
        if (to_string(st) == s) return st;
    throw IoError("unknown solve status '" + std::string(s) + "'");
}

void SolverConfig::validate() const {
    if (backend != "highs" && backend != "external" && backend != "cbc")
        throw ConfigError("unknown solver backend '" + backend + "' (expected highs, external or cbc)");
    if (!(time_limit_s > 0)) throw ConfigError("solver time limit must be positive");
    if (!(mip_gap_target >= 0 && mip_gap_target < 1)) throw ConfigError("mip gap target must lie in [0,1)");
    if (threads < 1) throw ConfigError("solver threads must be at least 1");
    if (!(binary_integrality_tolerance >= 0 && binary_integrality_tolerance < 0.5))
        throw ConfigError("binary integrality tolerance must lie in [0,0.5)");
}

double Solution::value(const MilpModel& model, std::string_view name) const {
    const auto idx = model.find_variable(name);
    if (!idx) throw ValidationError("no variable named " + std::string(name));
    if (!has_values()) throw ValidationError("solution has no values (status " + to_string(status) + ")");
    return values[*idx];
}

Solution solve(const MilpModel& model, const SolverConfig& config) {
    config.validate();
    if (!model.is_validated()) throw ValidationError("solve requires a validated model");
    const auto t0 = std::chrono::steady_clock::now();
    Solution sol;
    if (config.backend == "highs") sol = solve_with_highs(model, config);
    else if (config.backend == "external") sol = solve_external(model, config);
    else sol = solve_cbc(model, config);
    round_binaries(model, config, sol);
    if (sol.has_values() && config.backend != "highs") sol.objective_value = objective_of(model, sol.values);
    sol.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

SolutionFile read_solution_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open solution file " + path.string());
    SolutionFile s;
    std::string line;
    std::size_t n = 0;
    bool have_status = false;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq != std::string::npos) {
            try {
                s.values[line.substr(0, eq)] = std::stod(line.substr(eq + 1));
            } catch (const std::exception&) {
                throw ParseError(path.string(), n, "bad value line");
            }
            continue;
        }
        std::istringstream ls(line);
        std::string key, val;
        ls >> key >> val;
        if (key == "status") {
            s.status = solve_status_from_string(val);
            have_status = true;
        } else if (key == "objective") {
            s.objective = std::stod(val);
        } else if (key == "mip_gap") {
            s.mip_gap = std::stod(val);
        } else {
            throw ParseError(path.string(), n, "unexpected line '" + line + "'");
        }
    }
    if (!have_status) throw ParseError(path.string(), n, "missing status header");
    return s;
}

void write_solution_file(const std::filesystem::path& path, const SolutionFile& sol,
                         const std::vector<std::string>& order) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write solution file " + path.string());
    out << "status " << to_string(sol.status) << '\n';
    out << "objective " << fmt(sol.objective) << '\n';
    out << "mip_gap " << fmt(sol.mip_gap) << '\n';
    for (const auto& name : order) {
        const auto it = sol.values.find(name);
        if (it != sol.values.end()) out << name << '=' << fmt(it->second) << '\n';
    }
}

}  // namespace cst
