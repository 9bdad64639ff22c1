#pragma once

// Minimal free-format MPS reader used only by tests. It shares no code with
// the writer so a round trip exercises both sides independently.

#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cst::testing {

struct MpsColumn {
    std::string name;
    bool integer = false;
    double lb = 0.0;
    double ub = std::numeric_limits<double>::infinity();
    bool ub_set = false;
};

struct MpsRow {
    std::string name;
    char sense = 'N';
    double rhs = 0.0;
};

struct MpsModel {
    std::string name;
    bool maximize = false;
    std::vector<MpsRow> rows;  // constraint rows only
    std::vector<MpsColumn> columns;
    std::map<std::pair<std::size_t, std::size_t>, double> coefficients;  // (row, column)
    std::map<std::size_t, double> objective;
    double objective_rhs = 0.0;

    std::size_t nonzeros() const { return coefficients.size(); }
};

inline double mps_number(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw std::runtime_error("bad MPS number '" + s + "'");
    return v;
}

inline MpsModel read_mps_text(const std::string& text) {
    MpsModel m;
    std::istringstream in(text);
    std::string line, section, objective_row;
    std::map<std::string, std::size_t> row_of, col_of;
    bool in_int = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '*') continue;
        std::istringstream fields(line);
        std::vector<std::string> f;
        for (std::string tok; fields >> tok;) f.push_back(tok);
        if (f.empty()) continue;
        if (line[0] != ' ') {
            section = f[0];
            if (section == "NAME" && f.size() > 1) m.name = f[1];
            if (section == "OBJSENSE" && f.size() > 1) m.maximize = f[1] == "MAX" || f[1] == "MAXIMIZE";
            if (section == "ENDATA") break;
            continue;
        }
        if (section == "OBJSENSE") {
            m.maximize = f[0] == "MAX" || f[0] == "MAXIMIZE";
        } else if (section == "ROWS") {
            if (f[0] == "N") {
                if (objective_row.empty()) objective_row = f[1];
                continue;
            }
            row_of[f[1]] = m.rows.size();
            m.rows.push_back({f[1], f[0][0], 0.0});
        } else if (section == "COLUMNS") {
            if (f.size() >= 3 && f[1] == "'MARKER'") {
                in_int = f[2] == "'INTORG'";
                continue;
            }
            auto it = col_of.find(f[0]);
            if (it == col_of.end()) {
                it = col_of.emplace(f[0], m.columns.size()).first;
                MpsColumn c;
                c.name = f[0];
                c.integer = in_int;
                m.columns.push_back(c);
            }
            for (std::size_t i = 1; i + 1 < f.size(); i += 2) {
                const double v = mps_number(f[i + 1]);
                if (f[i] == objective_row) {
                    m.objective[it->second] += v;
                } else {
                    const auto r = row_of.at(f[i]);
                    m.coefficients[{r, it->second}] += v;
                }
            }
        } else if (section == "RHS") {
            for (std::size_t i = 1; i + 1 < f.size(); i += 2) {
                const double v = mps_number(f[i + 1]);
                if (f[i] == objective_row) m.objective_rhs = v;
                else m.rows[row_of.at(f[i])].rhs = v;
            }
        } else if (section == "BOUNDS") {
            auto& c = m.columns[col_of.at(f[2])];
            const std::string& kind = f[0];
            const double inf = std::numeric_limits<double>::infinity();
            if (kind == "FR") {
                c.lb = -inf;
                c.ub = inf;
            } else if (kind == "MI") {
                c.lb = -inf;
            } else if (kind == "PL") {
                c.ub = inf;
            } else if (kind == "BV") {
                c.lb = 0.0;
                c.ub = 1.0;
            } else {
                const double v = mps_number(f.at(3));
                if (kind == "LO") c.lb = v;
                else if (kind == "UP") c.ub = v, c.ub_set = true;
                else if (kind == "FX") c.lb = c.ub = v;
                else throw std::runtime_error("unsupported bound type " + kind);
            }
        } else {
            throw std::runtime_error("unsupported MPS section " + section);
        }
    }
    return m;
}

}  // namespace cst::testing
