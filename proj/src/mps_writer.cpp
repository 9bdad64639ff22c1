#include <charconv>
#include <fstream>
#include <sstream>

#include "cst/errors.hpp"
#include "cst/milp.hpp"

namespace cst {

std::string format_mps_number(double x) {
    if (x == 0.0) return "0";
    // Shortest text that parses back to the same double.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string write_mps(const MilpModel& m) {
    if (!m.is_validated()) throw ValidationError("write_mps requires a validated model");
    const auto& vars = m.variables();
    const auto& rows = m.rows();
    const auto& obj = m.objective();

    // Column-wise view of the row-wise storage, in row insertion order.
    std::vector<std::vector<std::pair<int, double>>> cols(vars.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (const auto& t : rows[r].terms) cols[t.var].push_back({static_cast<int>(r), t.coef});

    std::ostringstream out;
    out << "NAME " << m.name() << '\n';
    out << "OBJSENSE\n    " << (m.sense() == ObjSense::Maximize ? "MAX" : "MIN") << '\n';
    out << "ROWS\n N  obj\n";
    for (const auto& r : rows) {
        const char* s = r.sense == RowSense::Le ? "L" : r.sense == RowSense::Ge ? "G" : "E";
        out << ' ' << s << "  " << r.name << '\n';
    }

    out << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (std::size_t j = 0; j < vars.size(); ++j) {
        const bool is_int = vars[j].kind == VarKind::Binary;
        if (is_int && !in_int) {
            out << "    MARKER" << marker++ << " 'MARKER' 'INTORG'\n";
            in_int = true;
        } else if (!is_int && in_int) {
            out << "    MARKER" << marker++ << " 'MARKER' 'INTEND'\n";
            in_int = false;
        }
        const auto& name = vars[j].name;
        if (obj[j] != 0.0 || cols[j].empty()) out << "    " << name << " obj " << format_mps_number(obj[j]) << '\n';
        for (const auto& [r, c] : cols[j]) out << "    " << name << ' ' << rows[r].name << ' ' << format_mps_number(c) << '\n';
    }
    if (in_int) out << "    MARKER" << marker++ << " 'MARKER' 'INTEND'\n";

    out << "RHS\n";
    if (m.objective_constant() != 0.0) out << "    RHS obj " << format_mps_number(-m.objective_constant()) << '\n';
    for (const auto& r : rows)
        if (r.rhs != 0.0) out << "    RHS " << r.name << ' ' << format_mps_number(r.rhs) << '\n';

    out << "BOUNDS\n";
    for (const auto& v : vars) {
        const std::string& n = v.name;
        if (v.lb == v.ub) {
            out << " FX BND " << n << ' ' << format_mps_number(v.lb) << '\n';
            continue;
        }
        if (v.lb == -kInf && v.ub == kInf) {
            out << " FR BND " << n << '\n';
            continue;
        }
        if (v.lb == -kInf) out << " MI BND " << n << '\n';
        else if (v.lb != 0.0 || v.kind == VarKind::Binary) out << " LO BND " << n << ' ' << format_mps_number(v.lb) << '\n';
        if (v.ub != kInf) out << " UP BND " << n << ' ' << format_mps_number(v.ub) << '\n';
    }
    out << "ENDATA\n";
    return out.str();
}

void write_mps_file(const MilpModel& model, const std::filesystem::path& path) {
    const std::string text = write_mps(model);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write MPS file " + path.string());
    f << text;
    if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace cst
