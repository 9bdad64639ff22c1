#include "cst/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "cst/errors.hpp"
#include "cst/logic.hpp"

namespace cst {

using logic::below;
using logic::kTol;
using logic::reached;

SimulationResult simulate(const Plant& plant, const CostModel& costs, const DispatchPlan& plan,
                          const WeatherTrajectory& traj, const PriceProfile& prices, const SimOptions& options) {
    const PlantDesign& d = plant.design;
    const std::size_t K = traj.size();
    const double dt = traj.dt_hours;
    if (plan.horizon() != K) throw ValidationError("plan horizon does not match trajectory length");
    prices.validate(K);
    costs.validate();
    d.validate_for_step(dt);
    plan.validate(d, nullptr, 1e-5);

    const auto raw = potential_power_series(traj, d, plant.loss, plant.eff);
    std::vector<double> qp(K);
    for (std::size_t k = 0; k < K; ++k) qp[k] = logic::condition_potential_power(raw[k], d, options.epsilon);

    // Look-ahead over the horizon: would a receiver that generated at step
    // j-1 keep generating at j, and must a receiver generating at j shut
    // down at j? The shutdown draw at j depends on whether j+1 generates.
    std::vector<char> keep(K + 1, 0), shut(K, 0);
    for (std::size_t j = K; j-- > 0;) {
        shut[j] = plan.y_rsd[j] || (j + 1 < K && !keep[j + 1]);
        keep[j] = plan.y_r[j] && reached(plan.q_r_hat[j], d.q_rl) && !below(qp[j] - d.q_rsd * shut[j], d.q_rl);
    }

    SimulationResult out;
    out.start = traj.start_timestamp;
    out.dt_hours = dt;
    out.steps.resize(K);
    const double smin = d.storage_floor();
    ControlStep prev;
    prev.soc = smin;

    for (std::size_t k = 0; k < K; ++k) {
        StepRecord& rec = out.steps[k];
        ControlStep& c = rec.ctrl;
        rec.q_p = qp[k];
        rec.q_p_raw = raw[k];
        rec.price = prices.prices[k];
        const bool y_r = plan.y_r[k], y_c = plan.y_c[k];
        const double q_r_hat = plan.q_r_hat[k], q_c_hat = plan.q_c_hat[k];

        // receiver startup
        c.z[0] = below(qp[k], d.q_rl);
        c.d_rsu = logic::receiver_startup(y_r, c.z[0], prev.z[1], prev.d_r);
        c.e_rsu = c.d_rsu ? prev.e_rsu + dt * d.q_ru : 0.0;
        c.phi_r = c.d_rsu ? 0.0 : prev.e_rsu;
        c.z[1] = reached(c.e_rsu, d.e_r);
        c.d_rsup = c.d_rsu && !prev.d_rsu;

        // receiver generation and shutdown
        if (prev.d_r && prev.d_rsd) {
            c.d_r = 0;
            c.d_rsd = 0;
        } else if (prev.d_r) {
            if (!keep[k]) throw std::logic_error("receiver continuation without a scheduled shutdown");
            c.d_r = 1;
            c.d_rsd = shut[k];
        } else {
            c.d_r = c.z[1] && y_r && reached(q_r_hat, d.q_rl) &&
                    !below(qp[k] - d.q_ru * c.d_rsu - d.q_rsd * shut[k], d.q_rl);
            c.d_rsd = c.d_r && shut[k];
        }
        auto receiver_terms = [&] {
            c.q_avail = qp[k] - d.q_ru * c.d_rsu - d.q_rsd * c.d_rsd;
            c.z[2] = below(c.q_avail, d.q_rl);
            c.q_avail_gen = qp[k] * c.d_r - d.q_ru * c.d_rsu - d.q_rsd * c.d_rsd;
            c.z[3] = below(c.q_avail_gen, d.q_rl);
            c.z[4] = below(c.q_avail_gen, q_r_hat);
        };
        receiver_terms();
        c.q_ract = c.d_r ? std::min(logic::receiver_charge(c.q_avail_gen, q_r_hat, d.q_rl), d.q_rlim) : 0.0;

        // power block
        c.varphi = prev.soc - smin + dt * c.q_ract;
        c.z[6] = below(c.varphi, dt * d.q_c);
        c.d_csu = logic::pb_startup(y_c, prev.d_c, prev.z[5], c.z[6]) && reached(q_c_hat, d.q_c);
        c.e_csu = c.d_csu ? prev.e_csu + dt * d.q_c : 0.0;
        c.phi_c = c.d_csu ? 0.0 : prev.e_csu;
        c.z[5] = reached(c.e_csu, d.e_c);
        c.d_csup = c.d_csu && !prev.d_csu;
        c.d_c = y_c && (c.z[5] || prev.d_c) && reached(q_c_hat - d.q_c * c.d_csu, d.q_l) &&
                reached(c.varphi, dt * q_c_hat);
        c.q_cact = c.d_c ? std::min(q_c_hat - d.q_c * c.d_csu, d.q_u) : 0.0;
        c.d_csd = prev.d_c && !c.d_c;
        // forced: the plan still had the block generating at this step
        rec.csd_forced = c.d_csd && y_c && !plan.y_csd[k];

        // storage, with receiver curtailment on overflow
        const double drawn = c.q_cact + d.q_c * c.d_csu;
        double soc = prev.soc + dt * (c.q_ract - drawn);
        if (soc > d.e_u + kTol) {
            const double fits = (d.e_u - prev.soc) / dt + drawn;
            rec.curtailed = true;
            if (fits >= d.q_rl - kTol) {
                c.q_ract = std::min(c.q_ract, fits);
            } else {
                c.q_ract = 0.0;
                c.d_r = 0;
                c.d_rsd = 1;
                rec.rsd_forced = true;
                receiver_terms();
            }
            c.varphi = prev.soc - smin + dt * c.q_ract;
            soc = prev.soc + dt * (c.q_ract - drawn);
        }
        if (soc < smin - 1e-6 || soc > d.e_u + 1e-6)
            throw std::logic_error("storage left its bounds at step " + std::to_string(k));
        c.soc = std::clamp(soc, smin, d.e_u);
        // forced: the plan wanted generation to continue into the next step
        if (c.d_rsd && !plan.y_rsd[k] && k + 1 < K && plan.y_r[k + 1]) rec.rsd_forced = true;

        const double sd_draw = c.d_rsd ? std::min(d.q_rsd, qp[k]) : 0.0;
        rec.dump = std::max(0.0, qp[k] - d.q_ru * c.d_rsu - sd_draw - c.q_ract);

        // electrical side
        c.w = d.eta_p * c.q_cact + d.pb_intercept() * c.d_c;
        c.w_ramp = std::abs(c.w - prev.w);
        c.w_sold = c.w * (1.0 - d.condenser_fraction(k));
        c.w_purch = d.l_r * (c.q_ract + d.q_ru * c.d_rsu) + d.l_c * c.q_cact + d.w_h * c.d_r +
                    d.e_hs / dt * (c.d_rsd + c.d_rsu);

        auto& ev = out.events;
        ev.rsup += c.d_rsup;
        ev.csup += c.d_csup;
        if (c.d_rsd) (rec.rsd_forced ? ev.rsd_forced : ev.rsd_planned) += 1;
        if (c.d_csd) (rec.csd_forced ? ev.csd_forced : ev.csd_planned) += 1;
        out.dispatched_mwh += dt * c.w_sold;
        out.sales_value += dt * rec.price * c.w_sold;
        prev = c;
    }
    out.profit = profit_components(out, costs);
    return out;
}

ProfitBreakdown profit_components(const SimulationResult& r, const CostModel& costs) {
    ProfitBreakdown p;
    const double dt = r.dt_hours;
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
        const auto& s = r.steps[k];
        const auto& c = s.ctrl;
        const double disc = costs.discount(k);
        p.revenue += disc * dt * s.price * c.w_sold;
        p.purchase_cost += disc * dt * s.price * c.w_purch;
        p.receiver_opex += disc * (dt * costs.c_rec * c.q_ract + costs.c_rsup * c.d_rsup);
        p.receiver_sd_cost += disc * costs.alpha_r_sd * c.d_rsd;
        p.pb_opex += disc * (dt * costs.c_c * c.w + costs.c_dw * c.w_ramp + costs.c_csup * c.d_csup);
        p.pb_sd_cost += disc * costs.alpha_c_sd * c.d_csd;
    }
    p.profit = p.revenue - p.purchase_cost - p.receiver_opex - p.receiver_sd_cost - p.pb_opex - p.pb_sd_cost;
    return p;
}

std::string trace_csv(const SimulationResult& r) {
    std::string out =
        "step,timestamp,price,q_p,d_rsup,d_rsu,d_r,d_rsd,d_csup,d_csu,d_c,d_csd,q_ract,q_cact,dump,e_rsu,e_csu,"
        "soc,w,w_sold,w_purch,w_ramp,curtailed,rsd_forced,csd_forced\n";
    char buf[512];
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
        const auto& s = r.steps[k];
        const auto& c = s.ctrl;
        const auto ts = format_timestamp(add_hours(r.start, r.dt_hours * static_cast<double>(k)));
        std::snprintf(buf, sizeof buf,
                      "%zu,%s,%.10g,%.10g,%d,%d,%d,%d,%d,%d,%d,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,"
                      "%.10g,%.10g,%d,%d,%d\n",
                      k, ts.c_str(), s.price, s.q_p, c.d_rsup, c.d_rsu, c.d_r, c.d_rsd, c.d_csup, c.d_csu, c.d_c,
                      c.d_csd, c.q_ract, c.q_cact, s.dump, c.e_rsu, c.e_csu, c.soc, c.w, c.w_sold, c.w_purch, c.w_ramp,
                      int(s.curtailed), int(s.rsd_forced), int(s.csd_forced));
        out += buf;
    }
    return out;
}

void write_trace_csv(const SimulationResult& r, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write trace file " + path.string());
    f << trace_csv(r);
    if (!f) throw IoError("failed writing trace file " + path.string());
}

}  // namespace cst
