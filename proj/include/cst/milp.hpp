#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cst {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class RowSense { Le, Ge, Eq };
enum class ObjSense { Maximize, Minimize };

struct VarHandle {
    int index = -1;
};
struct RowHandle {
    int index = -1;
};

struct Term {
    int var;
    double coef;
};

struct Variable {
    std::string name;
    VarKind kind;
    double lb;
    double ub;
};

struct Row {
    std::string name;
    RowSense sense;
    double rhs;
    std::vector<Term> terms;
};

// Affine expression sum(coef*var) + constant, used to write rows in the
// same shape as the equations they implement.
struct LinExpr {
    std::vector<Term> terms;
    double constant = 0.0;

    LinExpr() = default;
    LinExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)
    LinExpr(VarHandle v, double coef = 1.0) : terms{{v.index, coef}} {}  // NOLINT

    LinExpr& operator+=(const LinExpr& o);
    LinExpr& operator-=(const LinExpr& o);
    LinExpr& operator*=(double s);
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double s, LinExpr a);
LinExpr operator*(LinExpr a, double s);
LinExpr operator-(LinExpr a);

class MilpModel {
public:
    explicit MilpModel(std::string name = "model");

    VarHandle add_variable(std::string name, VarKind kind, double lb, double ub);
    VarHandle add_binary(std::string name) { return add_variable(std::move(name), VarKind::Binary, 0.0, 1.0); }
    VarHandle add_continuous(std::string name, double lb, double ub) {
        return add_variable(std::move(name), VarKind::Continuous, lb, ub);
    }

    RowHandle add_row(std::string name, RowSense sense, double rhs, std::vector<Term> terms);
    // lhs (sense) rhs with both sides affine; everything is moved to the left.
    RowHandle add_constraint(std::string name, const LinExpr& lhs, RowSense sense, const LinExpr& rhs);

    void set_objective(std::vector<Term> terms, ObjSense sense, double constant = 0.0);
    void add_objective(const LinExpr& expr);
    void set_sense(ObjSense sense);
    void set_bounds(VarHandle v, double lb, double ub);

    // Throws ValidationError on the first problem. Mutations clear the flag.
    void validate();
    bool is_validated() const { return validated_; }

    const std::string& name() const { return name_; }
    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<double>& objective() const { return obj_; }
    double objective_constant() const { return obj_constant_; }
    ObjSense sense() const { return sense_; }

    std::size_t num_vars() const { return vars_.size(); }
    std::size_t num_rows() const { return rows_.size(); }
    std::size_t num_nonzeros() const;
    std::optional<int> find_variable(std::string_view name) const;
    std::optional<int> find_row(std::string_view name) const;

    // Largest |expr| over the variable bounds (interval arithmetic).
    double max_abs(const LinExpr& expr) const;

private:
    void check_var(int v) const;

    std::string name_;
    std::vector<Variable> vars_;
    std::vector<Row> rows_;
    std::vector<double> obj_;
    double obj_constant_ = 0.0;
    ObjSense sense_ = ObjSense::Maximize;
    std::unordered_map<std::string, int> var_index_;
    std::unordered_map<std::string, int> row_index_;
    bool validated_ = false;
};

// Tightest admissible big-M for a constraint family whose participating
// terms have the given total absolute bound: magnitude * 1.05.
double big_m_for(double bound_magnitude);

// Free-format MPS. Requires a validated model.
std::string write_mps(const MilpModel& model);
void write_mps_file(const MilpModel& model, const std::filesystem::path& path);
// Decimal rendering used by the writer: the shortest text that reads back
// to the same double.
std::string format_mps_number(double x);

enum class SolveStatus { Optimal, FeasibleGap, Infeasible, Unbounded, TimeLimit, SolverError };

std::string to_string(SolveStatus s);
SolveStatus solve_status_from_string(std::string_view s);

struct SolverConfig {
    std::string backend = "highs";  // highs | external | cbc
    double time_limit_s = 3600.0;
    double mip_gap_target = 0.005;
    int threads = 1;
    double binary_integrality_tolerance = 1e-6;
    // Executable for the external backends; empty means look in
    // CST_SOLVER_BIN (external) / CST_CBC_BIN (cbc), then PATH.
    std::string executable;
    bool verbose = false;

    void validate() const;
};

struct Solution {
    SolveStatus status = SolveStatus::SolverError;
    double objective_value = 0.0;
    std::vector<double> values;  // by variable index; empty when there is no incumbent
    double mip_gap = 0.0;
    double runtime_s = 0.0;
    std::string message;

    bool has_values() const { return !values.empty(); }
    double value(const MilpModel& model, std::string_view name) const;
};

Solution solve(const MilpModel& model, const SolverConfig& config);

// Parses the solution-file contract shared with the external solver tool:
//   status <status>
//   objective <value>
//   mip_gap <value>
//   <name>=<value>   (one line per variable)
struct SolutionFile {
    SolveStatus status = SolveStatus::SolverError;
    double objective = 0.0;
    double mip_gap = 0.0;
    std::unordered_map<std::string, double> values;
};
SolutionFile read_solution_file(const std::filesystem::path& path);
void write_solution_file(const std::filesystem::path& path, const SolutionFile& sol,
                         const std::vector<std::string>& order);

}  // namespace cst
