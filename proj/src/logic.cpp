#include "cst/logic.hpp"

#include <algorithm>
#include <array>

namespace cst::logic {

double condition_potential_power(double q_p, const PlantDesign& d, double eps) {
    std::array<double, 4> thresholds{d.q_rl, d.q_rl + d.q_ru, d.q_rl + d.q_rsd, d.q_rl + d.q_ru + d.q_rsd};
    std::sort(thresholds.begin(), thresholds.end());
    for (double t : thresholds)
        if (q_p > t - eps && q_p < t) q_p = t - eps;
    return q_p;
}

bool receiver_startup(bool y_r, bool z1, bool z2_prev, bool d_r_prev) {
    return y_r && !z1 && !z2_prev && !d_r_prev;
}

bool receiver_generation(bool y_r, bool z2, bool d_r_prev, bool z3) { return y_r && (z2 || d_r_prev) && !z3; }

double receiver_charge(double q_avail_gen, double q_r_hat, double q_rl) {
    if (below(q_avail_gen, q_rl)) return 0.0;
    if (below(q_avail_gen, q_r_hat)) return q_avail_gen;
    return q_r_hat;
}

bool pb_startup(bool y_c, bool d_c_prev, bool z6_prev, bool z7) { return y_c && !d_c_prev && !z6_prev && !z7; }

double switch_m(double magnitude, double eps) { return big_m_for(std::max(magnitude, 40.0 * eps)); }

void add_switch_below(MilpModel& m, const std::string& name, VarHandle z, const LinExpr& d, double eps,
                      BigMLog* log) {
    const double M = switch_m(m.max_abs(d), eps);
    // z=1 => d <= -eps
    const auto r1 = m.add_constraint(name + "_on", d + M * LinExpr(z), RowSense::Le, M - eps);
    // z=0 => d >= 0
    const auto r2 = m.add_constraint(name + "_off", d + M * LinExpr(z), RowSense::Ge, 0.0);
    if (log) {
        log->push_back({r1.index, {z.index}, d, M});
        log->push_back({r2.index, {z.index}, d, M});
    }
}

void add_switch_reached(MilpModel& m, const std::string& name, VarHandle z, const LinExpr& d, double eps,
                        BigMLog* log) {
    const double M = switch_m(m.max_abs(d), eps);
    // z=1 => d >= 0
    const auto r1 = m.add_constraint(name + "_on", d - M * LinExpr(z), RowSense::Ge, -M);
    // z=0 => d <= -eps
    const auto r2 = m.add_constraint(name + "_off", d - M * LinExpr(z), RowSense::Le, -eps);
    if (log) {
        log->push_back({r1.index, {z.index}, d, M});
        log->push_back({r2.index, {z.index}, d, M});
    }
}

void add_receiver_startup_rows(MilpModel& m, const std::string& t, const LinExpr& y_r, const LinExpr& z1,
                               const LinExpr& z2_prev, const LinExpr& d_r_prev, VarHandle d_rsu) {
    const LinExpr s(d_rsu);
    m.add_constraint("rsu_force_" + t, s, RowSense::Ge, y_r - d_r_prev - z1 - z2_prev);
    m.add_constraint("rsu_plan_" + t, s, RowSense::Le, y_r);
    m.add_constraint("rsu_sun_" + t, s + z1, RowSense::Le, 1.0);
    m.add_constraint("rsu_done_" + t, s + z2_prev, RowSense::Le, 1.0);
    m.add_constraint("rsu_gen_" + t, s + d_r_prev, RowSense::Le, 1.0);
}

void add_receiver_generation_rows(MilpModel& m, const std::string& t, const LinExpr& y_r, const LinExpr& z2,
                                  const LinExpr& d_r_prev, const LinExpr& z3, VarHandle d_r) {
    const LinExpr g(d_r);
    // One forcing row per way of being ready, so the rows stay feasible
    // even if both readiness flags are set.
    m.add_constraint("rgen_force_su_" + t, g, RowSense::Ge, y_r + z2 - z3 - 1.0);
    m.add_constraint("rgen_force_cont_" + t, g, RowSense::Ge, y_r + d_r_prev - z3 - 1.0);
    m.add_constraint("rgen_plan_" + t, g, RowSense::Le, y_r);
    m.add_constraint("rgen_ready_" + t, g, RowSense::Le, z2 + d_r_prev);
    m.add_constraint("rgen_power_" + t, g + z3, RowSense::Le, 1.0);
}

void add_receiver_charge_rows(MilpModel& m, const std::string& t, VarHandle q_ract, const LinExpr& q_avail_gen,
                              const LinExpr& q_r_hat, VarHandle z4, VarHandle z5, double q_rl, double eps,
                              BigMLog* log) {
    add_switch_below(m, "z4_" + t, z4, q_avail_gen - q_rl, eps, log);
    add_switch_below(m, "z5_" + t, z5, q_avail_gen - q_r_hat, eps, log);

    // |q_ract - q_avail_gen| <= M (1 + z4 - z5): tight only when z4=0, z5=1.
    const LinExpr gap = LinExpr(q_ract) - q_avail_gen;
    const double m20 = big_m_for(m.max_abs(gap));
    const LinExpr slack20 = m20 * (1.0 + LinExpr(z4) - LinExpr(z5));
    const auto a = m.add_constraint("rchg_avail_lo_" + t, gap, RowSense::Ge, -slack20);
    const auto b = m.add_constraint("rchg_avail_hi_" + t, gap, RowSense::Le, slack20);

    // |q_ract - q_r_hat| <= M z5: tight when z5=0.
    const LinExpr dev = LinExpr(q_ract) - q_r_hat;
    const double m21 = big_m_for(m.max_abs(dev));
    const auto c = m.add_constraint("rchg_plan_lo_" + t, dev, RowSense::Ge, -m21 * LinExpr(z5));
    const auto d = m.add_constraint("rchg_plan_hi_" + t, dev, RowSense::Le, m21 * LinExpr(z5));
    if (log) {
        log->push_back({a.index, {z4.index, z5.index}, gap, m20});
        log->push_back({b.index, {z4.index, z5.index}, gap, m20});
        log->push_back({c.index, {z5.index}, dev, m21});
        log->push_back({d.index, {z5.index}, dev, m21});
    }
}

void add_pb_startup_rows(MilpModel& m, const std::string& t, const LinExpr& y_c, const LinExpr& d_c_prev,
                         const LinExpr& z6_prev, const LinExpr& z7, VarHandle d_csu) {
    const LinExpr s(d_csu);
    m.add_constraint("csu_force_" + t, s, RowSense::Ge, y_c - d_c_prev - z6_prev - z7);
    m.add_constraint("csu_plan_" + t, s, RowSense::Le, y_c);
    m.add_constraint("csu_done_" + t, s + z6_prev, RowSense::Le, 1.0);
    m.add_constraint("csu_store_" + t, s + z7, RowSense::Le, 1.0);
    m.add_constraint("csu_gen_" + t, s + d_c_prev, RowSense::Le, 1.0);
}

}  // namespace cst::logic
