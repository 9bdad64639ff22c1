#pragma once

// Case functions against their row encodings. Each input is fixed, the
// output is maximised and then minimised over the rows alone, and both
// extremes must equal the direct evaluation: the rows are then feasible and
// pin the output to the case-function value.

#include <cmath>
#include <string>

#include "cst/logic.hpp"
#include "cst/milp.hpp"
#include "cst/random.hpp"

namespace cst::testing {

struct AgreementCount {
    int agree = 0;
    int total = 0;
    std::string first_mismatch;

    void record(bool ok, const std::string& what) {
        ++total;
        if (ok) ++agree;
        else if (first_mismatch.empty()) first_mismatch = what;
    }
    bool all() const { return total > 0 && agree == total; }
};

// Optimal value of `out` in both directions, or NaN when infeasible.
inline std::pair<double, double> pinned_range(MilpModel m, VarHandle out) {
    SolverConfig cfg;
    cfg.mip_gap_target = 0.0;
    std::pair<double, double> r{std::nan(""), std::nan("")};
    for (const auto sense : {ObjSense::Maximize, ObjSense::Minimize}) {
        m.set_objective({{out.index, 1.0}}, sense);
        m.validate();
        const auto s = solve(m, cfg);
        if (s.status != SolveStatus::Optimal) return {std::nan(""), std::nan("")};
        (sense == ObjSense::Maximize ? r.first : r.second) = s.values[out.index];
    }
    return r;
}

inline bool pinned_to(const std::pair<double, double>& r, double want, double tol = 1e-6) {
    return std::abs(r.first - want) <= tol && std::abs(r.second - want) <= tol;
}

inline std::string bits(std::initializer_list<int> b) {
    std::string s;
    for (int x : b) s += static_cast<char>('0' + x);
    return s;
}

// Receiver startup, power-block startup and receiver generation take 0/1
// inputs; `n` random input tuples each.
inline AgreementCount check_binary_rules(Rng& rng, int n) {
    AgreementCount c;
    for (int i = 0; i < n; ++i) {
        const int a = static_cast<int>(rng.below(2)), b = static_cast<int>(rng.below(2)),
                  d = static_cast<int>(rng.below(2)), e = static_cast<int>(rng.below(2));
        {
            MilpModel m("rsu");
            const auto out = m.add_binary("d_rsu");
            logic::add_receiver_startup_rows(m, "t", a, b, d, e, out);
            c.record(pinned_to(pinned_range(m, out), logic::receiver_startup(a, b, d, e)),
                     "receiver startup " + bits({a, b, d, e}));
        }
        {
            MilpModel m("rgen");
            const auto out = m.add_binary("d_r");
            logic::add_receiver_generation_rows(m, "t", a, b, d, e, out);
            c.record(pinned_to(pinned_range(m, out), logic::receiver_generation(a, b, d, e)),
                     "receiver generation " + bits({a, b, d, e}));
        }
        {
            MilpModel m("csu");
            const auto out = m.add_binary("d_csu");
            logic::add_pb_startup_rows(m, "t", a, b, d, e, out);
            c.record(pinned_to(pinned_range(m, out), logic::pb_startup(a, b, d, e)),
                     "power-block startup " + bits({a, b, d, e}));
        }
    }
    return c;
}

// Receiver output rule. Inputs are drawn from the states the plant can be
// in: a generating receiver has at least q_rl available and a setpoint in
// its envelope; an idle one has only (negative) startup/shutdown draws left.
// Values inside the epsilon gap just under a threshold are excluded since
// the potential power is conditioned away from them.
inline AgreementCount check_charge_rule(Rng& rng, int n, const PlantDesign& d, double eps) {
    AgreementCount c;
    int done = 0;
    while (done < n) {
        const bool generating = rng.bernoulli(0.7);
        double q_r_hat, qag;
        if (generating) {
            q_r_hat = d.q_rl + rng.uniform01() * (d.q_rlim - d.q_rl);
            qag = d.q_rl + rng.uniform01() * 800.0;
            // hit the thresholds exactly now and then
            const double pick = rng.uniform01();
            if (pick < 0.05) qag = d.q_rl;
            else if (pick < 0.10) qag = q_r_hat;
        } else {
            q_r_hat = rng.bernoulli(0.5) ? 0.0 : d.q_rl + rng.uniform01() * (d.q_rlim - d.q_rl);
            const double draws[3] = {0.0, -d.q_ru, -d.q_rsd};
            qag = draws[rng.below(3)];
        }
        auto in_gap = [&](double t) { return qag > t - eps && qag < t; };
        if (in_gap(d.q_rl) || in_gap(q_r_hat)) continue;
        ++done;

        MilpModel m("charge");
        const auto q = m.add_continuous("q_ract", 0.0, d.q_rlim);
        const auto z4 = m.add_binary("z4");
        const auto z5 = m.add_binary("z5");
        const double on = generating ? 1.0 : 0.0;
        m.add_constraint("gen_min", q, RowSense::Ge, d.q_rl * on);
        m.add_constraint("gen_max", q, RowSense::Le, d.q_rlim * on);
        logic::add_receiver_charge_rows(m, "t", q, qag, q_r_hat, z4, z5, d.q_rl, eps, nullptr);
        const double want = std::min(logic::receiver_charge(qag, q_r_hat, d.q_rl), d.q_rlim);
        c.record(pinned_to(pinned_range(m, q), want),
                 "receiver charge qag=" + std::to_string(qag) + " setpoint=" + std::to_string(q_r_hat));
    }
    return c;
}

}  // namespace cst::testing
