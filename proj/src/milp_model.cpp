#include <algorithm>
#include <cmath>
#include <map>

#include "cst/errors.hpp"
#include "cst/milp.hpp"

namespace cst {
namespace {

bool valid_name(std::string_view n) {
    if (n.empty() || n.size() > 255) return false;
    return std::all_of(n.begin(), n.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
}

// Sums duplicate variables and drops exact zeros, keeping first-seen order.
std::vector<Term> normalize(const std::vector<Term>& in) {
    std::vector<Term> out;
    std::map<int, std::size_t> pos;
    for (const auto& t : in) {
        auto [it, fresh] = pos.try_emplace(t.var, out.size());
        if (fresh) out.push_back(t);
        else out[it->second].coef += t.coef;
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coef == 0.0; }), out.end());
    return out;
}

}  // namespace

LinExpr& LinExpr::operator+=(const LinExpr& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    constant += o.constant;
    return *this;
}
LinExpr& LinExpr::operator-=(const LinExpr& o) {
    for (const auto& t : o.terms) terms.push_back({t.var, -t.coef});
    constant -= o.constant;
    return *this;
}
LinExpr& LinExpr::operator*=(double s) {
    for (auto& t : terms) t.coef *= s;
    constant *= s;
    return *this;
}
LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }
LinExpr operator*(LinExpr a, double s) { return a *= s; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }

MilpModel::MilpModel(std::string name) : name_(std::move(name)) {
    if (!valid_name(name_)) throw ValidationError("invalid model name '" + name_ + "'");
}

VarHandle MilpModel::add_variable(std::string name, VarKind kind, double lb, double ub) {
    if (!valid_name(name)) throw ValidationError("invalid variable name '" + name + "'");
    if (var_index_.count(name)) throw ValidationError("duplicate variable name '" + name + "'");
    const int idx = static_cast<int>(vars_.size());
    var_index_.emplace(name, idx);
    vars_.push_back({std::move(name), kind, lb, ub});
    obj_.push_back(0.0);
    validated_ = false;
    return {idx};
}

void MilpModel::check_var(int v) const {
    if (v < 0 || static_cast<std::size_t>(v) >= vars_.size())
        throw ValidationError("coefficient on unknown variable handle " + std::to_string(v));
}

RowHandle MilpModel::add_row(std::string name, RowSense sense, double rhs, std::vector<Term> terms) {
    if (!valid_name(name)) throw ValidationError("invalid row name '" + name + "'");
    if (row_index_.count(name)) throw ValidationError("duplicate row name '" + name + "'");
    for (const auto& t : terms) check_var(t.var);
    const int idx = static_cast<int>(rows_.size());
    row_index_.emplace(name, idx);
    rows_.push_back({std::move(name), sense, rhs, normalize(terms)});
    validated_ = false;
    return {idx};
}

RowHandle MilpModel::add_constraint(std::string name, const LinExpr& lhs, RowSense sense, const LinExpr& rhs) {
    LinExpr e = lhs - rhs;
    return add_row(std::move(name), sense, -e.constant, std::move(e.terms));
}

void MilpModel::set_objective(std::vector<Term> terms, ObjSense sense, double constant) {
    std::fill(obj_.begin(), obj_.end(), 0.0);
    for (const auto& t : terms) {
        check_var(t.var);
        obj_[t.var] += t.coef;
    }
    sense_ = sense;
    obj_constant_ = constant;
    validated_ = false;
}

void MilpModel::add_objective(const LinExpr& expr) {
    for (const auto& t : expr.terms) {
        check_var(t.var);
        obj_[t.var] += t.coef;
    }
    obj_constant_ += expr.constant;
    validated_ = false;
}

void MilpModel::set_sense(ObjSense sense) {
    sense_ = sense;
    validated_ = false;
}

void MilpModel::set_bounds(VarHandle v, double lb, double ub) {
    check_var(v.index);
    vars_[v.index].lb = lb;
    vars_[v.index].ub = ub;
    validated_ = false;
}

void MilpModel::validate() {
    for (const auto& v : vars_) {
        if (std::isnan(v.lb) || std::isnan(v.ub) || v.lb > v.ub || v.lb == kInf || v.ub == -kInf)
            throw ValidationError("variable " + v.name + " has inconsistent bounds");
        if (v.kind == VarKind::Binary && (v.lb < 0.0 || v.ub > 1.0))
            throw ValidationError("binary variable " + v.name + " has bounds outside [0,1]");
    }
    for (double c : obj_)
        if (!std::isfinite(c)) throw ValidationError("non-finite objective coefficient");
    if (!std::isfinite(obj_constant_)) throw ValidationError("non-finite objective constant");
    for (const auto& r : rows_) {
        if (!std::isfinite(r.rhs)) throw ValidationError("row " + r.name + " has a non-finite rhs");
        for (const auto& t : r.terms)
            if (!std::isfinite(t.coef)) throw ValidationError("row " + r.name + " has a non-finite coefficient");
        if (r.terms.empty()) {
            const bool ok = (r.sense == RowSense::Le && 0.0 <= r.rhs + 1e-12) ||
                            (r.sense == RowSense::Ge && 0.0 >= r.rhs - 1e-12) ||
                            (r.sense == RowSense::Eq && std::abs(r.rhs) <= 1e-12);
            if (!ok) throw ValidationError("constant row " + r.name + " can never hold");
        }
    }
    validated_ = true;
}

std::size_t MilpModel::num_nonzeros() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.terms.size();
    return n;
}

std::optional<int> MilpModel::find_variable(std::string_view name) const {
    const auto it = var_index_.find(std::string(name));
    if (it == var_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> MilpModel::find_row(std::string_view name) const {
    const auto it = row_index_.find(std::string(name));
    if (it == row_index_.end()) return std::nullopt;
    return it->second;
}

double MilpModel::max_abs(const LinExpr& expr) const {
    double lo = expr.constant, hi = expr.constant;
    for (const auto& t : expr.terms) {
        check_var(t.var);
        const auto& v = vars_[t.var];
        const double a = t.coef * v.lb, b = t.coef * v.ub;
        lo += std::min(a, b);
        hi += std::max(a, b);
    }
    return std::max(std::abs(lo), std::abs(hi));
}

double big_m_for(double magnitude) {
    if (!(magnitude > 0) || !std::isfinite(magnitude))
        throw ValidationError("big-M needs a positive finite bound magnitude");
    return magnitude * 1.05;
}

}  // namespace cst
