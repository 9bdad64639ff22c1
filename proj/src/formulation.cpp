#include "cst/formulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <nlohmann/json.hpp>

#include "cst/errors.hpp"

namespace cst {

namespace {

using logic::add_switch_below;
using logic::add_switch_reached;

std::string step_tag(std::size_t k) { return "k" + std::to_string(k); }
std::string step_tag(std::size_t k, std::size_t s) { return "k" + std::to_string(k) + "_s" + std::to_string(s); }

const std::vector<std::string> kPlanSymbols = {"y_r", "y_rsup", "y_rsd", "y_c", "y_csup", "y_csd", "q_r_hat", "q_c_hat"};

const std::vector<std::string> kControlSymbols = {
    "d_rsup", "d_rsu", "d_r", "d_rsd", "d_csup", "d_csu", "d_c", "d_csd",
    "z1", "z2", "z3", "z4", "z5", "z6", "z7",
    "q_ract", "q_cact", "e_rsu", "e_csu", "phi_r", "phi_c",
    "w", "w_ramp", "w_sold", "w_purch", "soc", "varphi", "q_avail", "q_avail_gen"};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

// ---------------------------------------------------------------- CostModel

void CostModel::validate() const {
    for (double v : {c_rec, c_c, c_rsup, c_csup, c_dw, alpha_r_sd, alpha_c_sd})
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("cost coefficients must be finite and >= 0");
    if (!(lambda_discount > 0.0 && lambda_discount <= 1.0))
        throw ValidationError("lambda_discount must lie in (0, 1]");
}

double CostModel::discount(std::size_t k) const { return std::pow(lambda_discount, static_cast<double>(k + 1)); }

// ------------------------------------------------------------- DispatchPlan

DispatchPlan DispatchPlan::all_off(std::size_t horizon) {
    DispatchPlan p;
    p.y_r.assign(horizon, 0);
    p.y_rsup.assign(horizon, 0);
    p.y_rsd.assign(horizon, 0);
    p.y_c.assign(horizon, 0);
    p.y_csup.assign(horizon, 0);
    p.y_csd.assign(horizon, 0);
    p.q_r_hat.assign(horizon, 0.0);
    p.q_c_hat.assign(horizon, 0.0);
    return p;
}

void DispatchPlan::validate(const PlantDesign& d, const std::vector<int>* daylight, double tol) const {
    const std::size_t K = horizon();
    auto fail = [](const std::string& rule, std::size_t k) {
        throw ValidationError("dispatch plan violates " + rule + " at step " + std::to_string(k));
    };
    for (const auto* v : {&y_rsup, &y_rsd, &y_c, &y_csup, &y_csd})
        if (v->size() != K) throw ValidationError("dispatch plan vectors have different lengths");
    if (q_r_hat.size() != K || q_c_hat.size() != K)
        throw ValidationError("dispatch plan vectors have different lengths");
    if (daylight && daylight->size() != K) throw ValidationError("daylight mask length differs from plan horizon");

    for (std::size_t k = 0; k < K; ++k) {
        for (const auto* v : {&y_r, &y_rsup, &y_rsd, &y_c, &y_csup, &y_csd})
            if ((*v)[k] != 0 && (*v)[k] != 1) fail("binary domain", k);
        const int yr_prev = k ? y_r[k - 1] : 0;
        const int yc_prev = k ? y_c[k - 1] : 0;
        if (daylight && y_r[k] && !(*daylight)[k]) fail("receiver daylight window", k);
        if (y_rsup[k] < y_r[k] - yr_prev) fail("receiver startup marks the first operating step", k);
        if (y_rsup[k] + yr_prev > 1) fail("receiver startup after operation", k);
        if (k > 0 && y_rsd[k - 1] < y_r[k - 1] - y_r[k]) fail("receiver shutdown on last operating step", k - 1);
        if (k > 0 && y_rsd[k - 1] + y_r[k] > 1) fail("receiver restart right after shutdown", k);
        const double on_r = y_r[k] - y_rsup[k];
        if (q_r_hat[k] < d.q_rl * on_r - tol || q_r_hat[k] > d.q_rlim * on_r + tol)
            fail("receiver setpoint envelope", k);

        if (y_csup[k] < y_c[k] - yc_prev) fail("power-block startup marks the first operating step", k);
        if (y_csd[k] < yc_prev - y_c[k]) fail("power-block shutdown after operation", k);
        if (y_csd[k] + y_c[k] > 1) fail("power-block shutdown during operation", k);
        if (y_csd[k] > yc_prev) fail("power-block shutdown without prior operation", k);
        const double on_c = y_c[k] - y_csup[k];
        const double lo = d.q_l * on_c + d.q_c * y_csup[k];
        const double hi = d.q_u * on_c + d.q_c * y_csup[k];
        if (q_c_hat[k] < lo - tol || q_c_hat[k] > hi + tol) fail("power-block setpoint envelope", k);
    }
}

std::string plan_to_json(const DispatchPlan& p, int indent) {
    nlohmann::ordered_json j;
    j["horizon"] = p.horizon();
    j["y_r"] = p.y_r;
    j["y_rsup"] = p.y_rsup;
    j["y_rsd"] = p.y_rsd;
    j["y_c"] = p.y_c;
    j["y_csup"] = p.y_csup;
    j["y_csd"] = p.y_csd;
    j["q_r_hat"] = p.q_r_hat;
    j["q_c_hat"] = p.q_c_hat;
    return j.dump(indent);
}

DispatchPlan plan_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("plan file is not valid JSON: ") + e.what());
    }
    DispatchPlan p;
    try {
        p.y_r = j.at("y_r").get<std::vector<int>>();
        p.y_rsup = j.at("y_rsup").get<std::vector<int>>();
        p.y_rsd = j.at("y_rsd").get<std::vector<int>>();
        p.y_c = j.at("y_c").get<std::vector<int>>();
        p.y_csup = j.at("y_csup").get<std::vector<int>>();
        p.y_csd = j.at("y_csd").get<std::vector<int>>();
        p.q_r_hat = j.at("q_r_hat").get<std::vector<double>>();
        p.q_c_hat = j.at("q_c_hat").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("plan file is missing or mistypes a field: ") + e.what());
    }
    if (j.contains("horizon") && j["horizon"].get<std::size_t>() != p.horizon())
        throw ValidationError("plan file horizon does not match its vectors");
    return p;
}

// ------------------------------------------------------------ SmilpIndexMap

const std::vector<std::string>& SmilpIndexMap::plan_symbols() { return kPlanSymbols; }
const std::vector<std::string>& SmilpIndexMap::control_symbols() { return kControlSymbols; }

bool SmilpIndexMap::is_binary_symbol(std::string_view s) {
    return s.starts_with("y_") || s.starts_with("d_") || (s.size() == 2 && s[0] == 'z');
}

int SmilpIndexMap::plan(std::string_view symbol, std::size_t k) const {
    auto it = plan_.find(symbol);
    if (it == plan_.end()) throw std::out_of_range("unknown plan symbol " + std::string(symbol));
    return it->second.at(k);
}

int SmilpIndexMap::control(std::string_view symbol, std::size_t k, std::size_t s) const {
    auto it = control_.find(symbol);
    if (it == control_.end()) throw std::out_of_range("unknown control symbol " + std::string(symbol));
    return it->second.at(s).at(k);
}

std::vector<int> SmilpIndexMap::scenario_variables(std::size_t s) const {
    std::vector<int> out;
    for (const auto& [sym, by_s] : control_)
        for (int v : by_s.at(s)) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

std::string SmilpIndexMap::to_json(const MilpModel& model, int indent) const {
    nlohmann::ordered_json j;
    j["horizon"] = horizon_;
    j["scenarios"] = scenarios_;
    auto name = [&](int v) { return model.variables().at(v).name; };
    nlohmann::ordered_json plan = nlohmann::ordered_json::object();
    for (const auto& sym : kPlanSymbols) {
        auto arr = nlohmann::ordered_json::array();
        for (int v : plan_.at(sym)) arr.push_back(name(v));
        plan[sym] = arr;
    }
    j["plan"] = plan;
    nlohmann::ordered_json ctrl = nlohmann::ordered_json::object();
    for (const auto& sym : kControlSymbols) {
        auto per_s = nlohmann::ordered_json::array();
        for (const auto& by_k : control_.at(sym)) {
            auto arr = nlohmann::ordered_json::array();
            for (int v : by_k) arr.push_back(name(v));
            per_s.push_back(arr);
        }
        ctrl[sym] = per_s;
    }
    j["control"] = ctrl;
    return j.dump(indent);
}

// ------------------------------------------------------------------ builder

std::vector<int> daylight_mask(const std::vector<WeatherTrajectory>& scenarios, const ModelOptions& options) {
    if (scenarios.empty()) return {};
    const std::size_t K = scenarios.front().size();
    std::vector<int> mask(K, 0);
    if (options.daylight_hours) {
        const auto [rise, set] = *options.daylight_hours;
        for (std::size_t k = 0; k < K; ++k) {
            const double h = hour_of_day(scenarios.front().time_at(k));
            mask[k] = (h > rise && h < set) ? 1 : 0;
        }
        return mask;
    }
    std::optional<std::size_t> first, last;
    for (std::size_t k = 0; k < K; ++k) {
        for (const auto& t : scenarios) {
            if (t.samples[k].dni > 0.0) {
                if (!first) first = k;
                last = k;
                break;
            }
        }
    }
    if (first)
        for (std::size_t k = *first; k <= *last; ++k) mask[k] = 1;
    return mask;
}

class SmilpBuilder {
public:
    explicit SmilpBuilder(Formulation& f) : f_(f), m_(f.model), d_(f.design) {}

    void run() {
        K_ = f_.prices.size();
        Ns_ = f_.potential_power.size();
        f_.index.horizon_ = K_;
        f_.index.scenarios_ = Ns_;
        add_plan();
        for (std::size_t s = 0; s < Ns_; ++s) add_scenario(s);
        m_.set_sense(ObjSense::Maximize);
        m_.validate();
    }

private:
    VarHandle plan(const std::string& sym, std::size_t k) const { return {f_.index.plan_.at(sym)[k]}; }

    void add_plan() {
        for (const auto& sym : kPlanSymbols) f_.index.plan_[sym].assign(K_, -1);
        for (std::size_t k = 0; k < K_; ++k) {
            for (const auto& sym : kPlanSymbols) {
                const std::string name = sym + "_" + step_tag(k);
                VarHandle v;
                if (sym == "q_r_hat") {
                    v = m_.add_continuous(name, 0.0, d_.q_rlim);
                } else if (sym == "q_c_hat") {
                    v = m_.add_continuous(name, 0.0, std::max(d_.q_u, d_.q_c));
                } else {
                    v = m_.add_binary(name);
                    if (sym == "y_r" && !f_.daylight[k]) m_.set_bounds(v, 0.0, 0.0);
                }
                f_.index.plan_[sym][k] = v.index;
            }
        }
        for (std::size_t k = 0; k < K_; ++k) {
            const auto t = step_tag(k);
            const LinExpr yr = plan("y_r", k), yrsup = plan("y_rsup", k);
            const LinExpr yc = plan("y_c", k), ycsup = plan("y_csup", k), ycsd = plan("y_csd", k);
            const LinExpr yr_prev = k ? LinExpr(plan("y_r", k - 1)) : LinExpr(0.0);
            const LinExpr yc_prev = k ? LinExpr(plan("y_c", k - 1)) : LinExpr(0.0);

            m_.add_constraint("plan_rsup_first_" + t, yrsup, RowSense::Ge, yr - yr_prev);
            m_.add_constraint("plan_rsup_once_" + t, yrsup + yr_prev, RowSense::Le, 1.0);
            if (k > 0) {
                const LinExpr yrsd_prev = plan("y_rsd", k - 1);
                m_.add_constraint("plan_rsd_last_" + t, yrsd_prev, RowSense::Ge, yr_prev - yr);
                m_.add_constraint("plan_rsd_off_" + t, yrsd_prev + yr, RowSense::Le, 1.0);
            }
            const LinExpr on_r = yr - yrsup;
            const LinExpr qr = plan("q_r_hat", k);
            m_.add_constraint("plan_qr_lo_" + t, qr, RowSense::Ge, d_.q_rl * on_r);
            m_.add_constraint("plan_qr_hi_" + t, qr, RowSense::Le, d_.q_rlim * on_r);

            m_.add_constraint("plan_csup_first_" + t, ycsup, RowSense::Ge, yc - yc_prev);
            m_.add_constraint("plan_csd_after_" + t, ycsd, RowSense::Ge, yc_prev - yc);
            m_.add_constraint("plan_csd_off_" + t, ycsd + yc, RowSense::Le, 1.0);
            m_.add_constraint("plan_csd_prior_" + t, ycsd, RowSense::Le, yc_prev);
            const LinExpr on_c = yc - ycsup;
            const LinExpr qc = plan("q_c_hat", k);
            m_.add_constraint("plan_qc_lo_" + t, qc, RowSense::Ge, d_.q_l * on_c + d_.q_c * ycsup);
            m_.add_constraint("plan_qc_hi_" + t, qc, RowSense::Le, d_.q_u * on_c + d_.q_c * ycsup);
        }
    }

    void add_scenario(std::size_t s) {
        for (const auto& sym : kControlSymbols) f_.index.control_[sym].resize(Ns_, std::vector<int>(K_, -1));

        const double dt = f_.dt_hours;
        const double eps = f_.epsilon;
        const double smin = d_.storage_floor();
        const double intercept = d_.pb_intercept();
        const double w_lo = std::min(0.0, intercept);
        const double w_hi = d_.w_u;
        const double wp_hi = d_.l_r * (d_.q_rlim + d_.q_ru) + d_.l_c * d_.q_u + d_.w_h + 2.0 * d_.e_hs / dt;
        const double weight_base = 1.0 / static_cast<double>(Ns_);

        LinExpr dr_prev(0.0), drsu_prev(0.0), drsd_prev(0.0), ersu_prev(0.0), z2_prev(0.0);
        LinExpr dc_prev(0.0), dcsu_prev(0.0), ecsu_prev(0.0), z6_prev(0.0);
        LinExpr soc_prev(smin), w_prev(0.0);

        for (std::size_t k = 0; k < K_; ++k) {
            const auto t = step_tag(k, s);
            const double qp = f_.potential_power[s][k];
            const double eta_c = d_.condenser_fraction(k);

            auto var = [&](const std::string& sym, VarKind kind, double lb, double ub) {
                const VarHandle v = m_.add_variable(sym + "_" + t, kind, lb, ub);
                f_.index.control_[sym][s][k] = v.index;
                return v;
            };
            auto bin = [&](const std::string& sym) { return var(sym, VarKind::Binary, 0.0, 1.0); };
            auto cont = [&](const std::string& sym, double lb, double ub) {
                return var(sym, VarKind::Continuous, lb, ub);
            };

            const VarHandle d_rsup = bin("d_rsup"), d_rsu = bin("d_rsu"), d_r = bin("d_r"), d_rsd = bin("d_rsd");
            const VarHandle d_csup = bin("d_csup"), d_csu = bin("d_csu"), d_c = bin("d_c"), d_csd = bin("d_csd");
            const VarHandle z1 = bin("z1"), z2 = bin("z2"), z3 = bin("z3"), z4 = bin("z4"), z5 = bin("z5"),
                            z6 = bin("z6"), z7 = bin("z7");
            const VarHandle q_ract = cont("q_ract", 0.0, d_.q_rlim);
            const VarHandle q_cact = cont("q_cact", 0.0, d_.q_u);
            const VarHandle e_rsu = cont("e_rsu", 0.0, d_.e_r);
            const VarHandle e_csu = cont("e_csu", 0.0, d_.e_c);
            const VarHandle phi_r = cont("phi_r", 0.0, d_.e_r);
            const VarHandle phi_c = cont("phi_c", 0.0, d_.e_c);
            const VarHandle w = cont("w", w_lo, w_hi);
            const VarHandle w_ramp = cont("w_ramp", 0.0, w_hi - w_lo);
            const VarHandle w_sold = cont("w_sold", std::min(0.0, (1.0 - eta_c) * w_lo), (1.0 - eta_c) * w_hi);
            const VarHandle w_purch = cont("w_purch", 0.0, wp_hi);
            const VarHandle soc = cont("soc", smin, d_.e_u);
            const VarHandle varphi = cont("varphi", 0.0, d_.e_u - smin + dt * d_.q_rlim);
            const VarHandle q_avail = cont("q_avail", qp - d_.q_ru - d_.q_rsd, qp);
            const VarHandle q_avail_gen = cont("q_avail_gen", std::min(0.0, qp) - d_.q_ru - d_.q_rsd, qp);

            const LinExpr y_r = plan("y_r", k), y_rsd = plan("y_rsd", k), y_c = plan("y_c", k),
                          y_csd = plan("y_csd", k), q_r_hat = plan("q_r_hat", k), q_c_hat = plan("q_c_hat", k);
            auto* log = &f_.big_m;

            // receiver startup energy
            m_.add_constraint("rsu_energy_" + t, LinExpr(e_rsu) + LinExpr(phi_r), RowSense::Eq,
                              ersu_prev + dt * d_.q_ru * LinExpr(d_rsu));
            m_.add_constraint("rsu_cap_" + t, e_rsu, RowSense::Le, d_.e_r * LinExpr(d_rsu));
            m_.add_constraint("rsu_slack_prev_" + t, phi_r, RowSense::Le, d_.e_r * drsu_prev);
            m_.add_constraint("rsu_slack_now_" + t, LinExpr(phi_r) + d_.e_r * LinExpr(d_rsu), RowSense::Le, d_.e_r);

            add_switch_below(m_, "z1_" + t, z1, LinExpr(qp - d_.q_rl), eps, log);
            add_switch_reached(m_, "z2_" + t, z2, LinExpr(e_rsu) - d_.e_r, eps, log);
            logic::add_receiver_startup_rows(m_, t, y_r, z1, z2_prev, dr_prev, d_rsu);

            m_.add_constraint("rsup_edge_" + t, d_rsup, RowSense::Ge, LinExpr(d_rsu) - drsu_prev);
            m_.add_constraint("rsup_in_" + t, d_rsup, RowSense::Le, d_rsu);
            m_.add_constraint("rsup_once_" + t, LinExpr(d_rsup) + drsu_prev, RowSense::Le, 1.0);

            // receiver generation
            m_.add_constraint("rpower_" + t, LinExpr(q_ract) + d_.q_ru * LinExpr(d_rsu) + d_.q_rsd * LinExpr(d_rsd),
                              RowSense::Le, qp);
            m_.add_constraint("rgen_min_" + t, q_ract, RowSense::Ge, d_.q_rl * LinExpr(d_r));
            m_.add_constraint("rgen_max_" + t, q_ract, RowSense::Le, d_.q_rlim * LinExpr(d_r));
            m_.add_constraint("ravail_" + t, LinExpr(q_avail) + d_.q_ru * LinExpr(d_rsu) + d_.q_rsd * LinExpr(d_rsd),
                              RowSense::Eq, qp);
            add_switch_below(m_, "z3_" + t, z3, LinExpr(q_avail) - d_.q_rl, eps, log);
            logic::add_receiver_generation_rows(m_, t, y_r, z2, dr_prev, z3, d_r);
            m_.add_constraint("ravail_gen_" + t,
                              LinExpr(q_avail_gen) - qp * LinExpr(d_r) + d_.q_ru * LinExpr(d_rsu) +
                                  d_.q_rsd * LinExpr(d_rsd),
                              RowSense::Eq, 0.0);
            logic::add_receiver_charge_rows(m_, t, q_ract, q_avail_gen, q_r_hat, z4, z5, d_.q_rl, eps, log);

            // receiver shutdown
            if (k > 0) {
                m_.add_constraint("rsd_end_" + t, drsd_prev, RowSense::Ge, dr_prev - LinExpr(d_r));
                m_.add_constraint("rsd_off_" + t, drsd_prev + LinExpr(d_r), RowSense::Le, 1.0);
            }
            m_.add_constraint("rsd_gen_" + t, d_rsd, RowSense::Le, d_r);
            {
                const LinExpr guarded = LinExpr(d_rsd) - 1.0;
                const double M = big_m_for(m_.max_abs(guarded));
                const LinExpr slack = M * (2.0 - y_rsd - LinExpr(d_r));
                const auto a = m_.add_constraint("rsd_plan_lo_" + t, guarded, RowSense::Ge, -slack);
                const auto b = m_.add_constraint("rsd_plan_hi_" + t, guarded, RowSense::Le, slack);
                const int yv = plan("y_rsd", k).index;
                log->push_back({a.index, {yv, d_r.index}, guarded, M});
                log->push_back({b.index, {yv, d_r.index}, guarded, M});
            }
            if (k + 1 == K_) m_.add_constraint("rsd_horizon_" + t, d_rsd, RowSense::Le, y_rsd);

            // power-block startup energy
            m_.add_constraint("csu_energy_" + t, LinExpr(e_csu) + LinExpr(phi_c), RowSense::Eq,
                              ecsu_prev + dt * d_.q_c * LinExpr(d_csu));
            m_.add_constraint("csu_slack_prev_" + t, phi_c, RowSense::Le, d_.e_c * dcsu_prev);
            m_.add_constraint("csu_slack_now_" + t, LinExpr(phi_c) + d_.e_c * LinExpr(d_csu), RowSense::Le, d_.e_c);
            m_.add_constraint("csu_cap_" + t, e_csu, RowSense::Le, d_.e_c * LinExpr(d_csu));
            add_switch_reached(m_, "z6_" + t, z6, LinExpr(e_csu) - d_.e_c, eps, log);
            m_.add_constraint("store_left_" + t, LinExpr(varphi) - dt * LinExpr(q_ract), RowSense::Eq, soc_prev - smin);
            add_switch_below(m_, "z7_" + t, z7, LinExpr(varphi) - dt * d_.q_c, eps, log);
            logic::add_pb_startup_rows(m_, t, y_c, dc_prev, z6_prev, z7, d_csu);
            m_.add_constraint("csup_edge_" + t, d_csup, RowSense::Ge, LinExpr(d_csu) - dcsu_prev);
            m_.add_constraint("csup_in_" + t, d_csup, RowSense::Le, d_csu);
            m_.add_constraint("csup_once_" + t, LinExpr(d_csup) + dcsu_prev, RowSense::Le, 1.0);

            // power-block generation
            m_.add_constraint("cgen_ready_" + t, d_c, RowSense::Le, LinExpr(z6) + dc_prev);
            m_.add_constraint("cgen_min_" + t, q_cact, RowSense::Ge, d_.q_l * LinExpr(d_c));
            m_.add_constraint("cgen_max_" + t, q_cact, RowSense::Le, d_.q_u * LinExpr(d_c));
            const LinExpr drawn = LinExpr(q_cact) + d_.q_c * LinExpr(d_csu);
            m_.add_constraint("ctrack_hi_" + t, drawn, RowSense::Le, q_c_hat);
            {
                const LinExpr guarded = q_c_hat - drawn;
                const double M = big_m_for(m_.max_abs(guarded));
                const auto r = m_.add_constraint("ctrack_lo_" + t, guarded, RowSense::Le, M * (1.0 - LinExpr(d_c)));
                log->push_back({r.index, {d_c.index}, guarded, M});
            }
            if (k > 0) {
                // Generation continues whenever it is planned and storage can fund the setpoint.
                const LinExpr guarded = LinExpr(varphi) - dt * q_c_hat;
                const double M = logic::switch_m(m_.max_abs(guarded), eps);
                const auto r = m_.add_constraint("ccontinue_" + t, guarded, RowSense::Le,
                                                 -eps + M * (2.0 + LinExpr(d_c) - y_c - dc_prev));
                log->push_back({r.index, {d_c.index, plan("y_c", k).index, f_.index.control_["d_c"][s][k - 1]},
                                guarded, M});
            }

            // storage
            m_.add_constraint("storage_" + t, LinExpr(soc) - dt * (LinExpr(q_ract) - drawn), RowSense::Eq, soc_prev);

            // electrical side
            m_.add_constraint("wgross_" + t, LinExpr(w) - d_.eta_p * LinExpr(q_cact) - intercept * LinExpr(d_c),
                              RowSense::Eq, 0.0);
            m_.add_constraint("wramp_up_" + t, w_ramp, RowSense::Ge, LinExpr(w) - w_prev);
            m_.add_constraint("wramp_dn_" + t, w_ramp, RowSense::Ge, w_prev - LinExpr(w));
            m_.add_constraint("wsold_" + t, LinExpr(w_sold) - (1.0 - eta_c) * LinExpr(w), RowSense::Eq, 0.0);
            m_.add_constraint("wpurch_" + t,
                              LinExpr(w_purch) - d_.l_r * (LinExpr(q_ract) + d_.q_ru * LinExpr(d_rsu)) -
                                  d_.l_c * LinExpr(q_cact) - d_.w_h * LinExpr(d_r) -
                                  (d_.e_hs / dt) * (LinExpr(d_rsd) + LinExpr(d_rsu)),
                              RowSense::Eq, 0.0);

            // power-block shutdown
            {
                const LinExpr guarded = LinExpr(d_csd) - 1.0;
                const double M = big_m_for(m_.max_abs(guarded));
                const LinExpr slack = M * (2.0 - y_csd - dc_prev);
                const auto a = m_.add_constraint("csd_plan_lo_" + t, guarded, RowSense::Ge, -slack);
                const auto b = m_.add_constraint("csd_plan_hi_" + t, guarded, RowSense::Le, slack);
                std::vector<int> sw{plan("y_csd", k).index};
                if (k > 0) sw.push_back(f_.index.control_["d_c"][s][k - 1]);
                log->push_back({a.index, sw, guarded, M});
                log->push_back({b.index, sw, guarded, M});
            }
            m_.add_constraint("csd_end_" + t, d_csd, RowSense::Ge, dc_prev - LinExpr(d_c));
            m_.add_constraint("csd_excl_" + t, LinExpr(d_csd) + LinExpr(d_c), RowSense::Le, 1.0);
            m_.add_constraint("csd_prior_" + t, d_csd, RowSense::Le, dc_prev);

            // objective
            const double wk = weight_base * f_.costs.discount(k);
            const double price = f_.prices[k];
            const auto& c = f_.costs;
            m_.add_objective(wk * (dt * price * LinExpr(w_sold) - dt * price * LinExpr(w_purch) -
                                   dt * c.c_rec * LinExpr(q_ract) - dt * c.c_c * LinExpr(w) -
                                   c.c_dw * LinExpr(w_ramp) - c.c_rsup * LinExpr(d_rsup) -
                                   c.alpha_r_sd * LinExpr(d_rsd) - c.c_csup * LinExpr(d_csup) -
                                   c.alpha_c_sd * LinExpr(d_csd)));

            dr_prev = d_r;
            drsu_prev = d_rsu;
            drsd_prev = d_rsd;
            ersu_prev = e_rsu;
            z2_prev = z2;
            dc_prev = d_c;
            dcsu_prev = d_csu;
            ecsu_prev = e_csu;
            z6_prev = z6;
            soc_prev = soc;
            w_prev = w;
        }
    }

    Formulation& f_;
    MilpModel& m_;
    const PlantDesign& d_;
    std::size_t K_ = 0;
    std::size_t Ns_ = 0;
};

Formulation build_smilp(const Plant& plant, const CostModel& costs, const std::vector<WeatherTrajectory>& scenarios,
                        const PriceProfile& prices, const ModelOptions& options) {
    if (scenarios.empty()) throw ValidationError("scenario space is empty");
    const std::size_t K = scenarios.front().size();
    const double dt = scenarios.front().dt_hours;
    for (const auto& t : scenarios) {
        t.validate();
        if (t.size() != K) throw ValidationError("scenario trajectories have different lengths");
        if (std::abs(t.dt_hours - dt) > 1e-12) throw ValidationError("scenario trajectories have different steps");
    }
    prices.validate(K);
    costs.validate();
    plant.design.validate();
    plant.design.validate_for_step(dt);
    plant.loss.validate();
    plant.eff.check_step(dt);
    if (!(options.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (plant.design.eta_c.size() != 1 && plant.design.eta_c.size() < K)
        throw ValidationError("per-step condenser fractions do not cover the horizon");

    Formulation f{MilpModel(options.name), {}, {}, {}, {}, {}, 0.0, options.epsilon, plant.design, costs};
    f.prices = prices.prices;
    f.dt_hours = dt;
    for (const auto& t : scenarios) {
        auto series = potential_power_series(t, plant.design, plant.loss, plant.eff);
        for (double& q : series) q = logic::condition_potential_power(q, plant.design, options.epsilon);
        f.potential_power.push_back(std::move(series));
    }
    f.daylight = daylight_mask(scenarios, options);
    SmilpBuilder(f).run();
    return f;
}

Formulation build_deterministic(const Plant& plant, const CostModel& costs, const WeatherTrajectory& trajectory,
                                const PriceProfile& prices, const ModelOptions& options) {
    return build_smilp(plant, costs, std::vector<WeatherTrajectory>{trajectory}, prices, options);
}

// --------------------------------------------------------------- extraction

namespace {

int round_binary(double v, double tol, const std::string& name) {
    if (std::abs(v) <= tol) return 0;
    if (std::abs(v - 1.0) <= tol) return 1;
    throw SolverError("binary variable " + name + " has non-integral value " + std::to_string(v));
}

double clean(double v) { return std::abs(v) < 1e-9 ? 0.0 : v; }

}  // namespace

DispatchPlan extract_dispatch_plan(const Solution& sol, const Formulation& f, double tol) {
    if (!sol.has_values()) throw SolverError("solution has no values to extract a plan from");
    const auto& vars = f.model.variables();
    const std::size_t K = f.index.horizon();
    DispatchPlan p = DispatchPlan::all_off(K);
    auto b = [&](const char* sym, std::size_t k) {
        const int v = f.index.plan(sym, k);
        return round_binary(sol.values.at(v), tol, vars[v].name);
    };
    for (std::size_t k = 0; k < K; ++k) {
        p.y_r[k] = b("y_r", k);
        p.y_rsup[k] = b("y_rsup", k);
        p.y_rsd[k] = b("y_rsd", k);
        p.y_c[k] = b("y_c", k);
        p.y_csup[k] = b("y_csup", k);
        p.y_csd[k] = b("y_csd", k);
        p.q_r_hat[k] = clean(sol.values.at(f.index.plan("q_r_hat", k)));
        p.q_c_hat[k] = clean(sol.values.at(f.index.plan("q_c_hat", k)));
    }
    p.validate(f.design, &f.daylight, 1e-5);
    return p;
}

std::vector<ControlStep> extract_control_trajectories(const Solution& sol, const Formulation& f, std::size_t s,
                                                      double tol) {
    if (!sol.has_values()) throw SolverError("solution has no values to extract controls from");
    if (s >= f.index.scenarios()) throw std::out_of_range("scenario index out of range");
    const auto& vars = f.model.variables();
    const std::size_t K = f.index.horizon();
    std::vector<ControlStep> out(K);
    for (std::size_t k = 0; k < K; ++k) {
        auto b = [&](const char* sym) {
            const int v = f.index.control(sym, k, s);
            return round_binary(sol.values.at(v), tol, vars[v].name);
        };
        auto c = [&](const char* sym) { return clean(sol.values.at(f.index.control(sym, k, s))); };
        ControlStep& x = out[k];
        x.d_rsup = b("d_rsup");
        x.d_rsu = b("d_rsu");
        x.d_r = b("d_r");
        x.d_rsd = b("d_rsd");
        x.d_csup = b("d_csup");
        x.d_csu = b("d_csu");
        x.d_c = b("d_c");
        x.d_csd = b("d_csd");
        static const char* zs[7] = {"z1", "z2", "z3", "z4", "z5", "z6", "z7"};
        for (int i = 0; i < 7; ++i) x.z[i] = b(zs[i]);
        x.q_ract = c("q_ract");
        x.q_cact = c("q_cact");
        x.e_rsu = c("e_rsu");
        x.e_csu = c("e_csu");
        x.phi_r = c("phi_r");
        x.phi_c = c("phi_c");
        x.w = c("w");
        x.w_ramp = c("w_ramp");
        x.w_sold = c("w_sold");
        x.w_purch = c("w_purch");
        x.soc = c("soc");
        x.varphi = c("varphi");
        x.q_avail = c("q_avail");
        x.q_avail_gen = c("q_avail_gen");
    }
    return out;
}

std::vector<double> scenario_objectives(const Solution& sol, const Formulation& f) {
    if (!sol.has_values()) throw SolverError("solution has no values");
    const auto& obj = f.model.objective();
    const double ns = static_cast<double>(f.index.scenarios());
    std::vector<double> out;
    for (std::size_t s = 0; s < f.index.scenarios(); ++s) {
        double acc = 0.0;
        for (int v : f.index.scenario_variables(s)) acc += obj[v] * sol.values[v];
        out.push_back(acc * ns);
    }
    return out;
}

OptimizeResult optimize(const Formulation& f, const SolverConfig& config, bool polish) {
    OptimizeResult r;
    const auto t0 = std::chrono::steady_clock::now();
    r.solution = solve(f.model, config);
    if (!r.solution.has_values()) {
        r.solve_seconds = elapsed_s(t0);
        return r;
    }
    DispatchPlan plan = extract_dispatch_plan(r.solution, f, config.binary_integrality_tolerance);
    if (polish) {
        MilpModel fixed = f.model;
        for (const auto& sym : SmilpIndexMap::plan_symbols()) {
            for (std::size_t k = 0; k < f.index.horizon(); ++k) {
                const int v = f.index.plan(sym, k);
                double x = r.solution.values[v];
                if (SmilpIndexMap::is_binary_symbol(sym)) x = std::round(x);
                fixed.set_bounds({v}, x, x);
            }
        }
        fixed.validate();
        SolverConfig cfg = config;
        cfg.mip_gap_target = 0.0;
        Solution again = solve(fixed, cfg);
        if (again.status == SolveStatus::Optimal && again.has_values() &&
            again.objective_value >= r.solution.objective_value - 1e-6 * std::max(1.0, std::abs(r.solution.objective_value))) {
            again.mip_gap = r.solution.mip_gap;
            again.runtime_s += r.solution.runtime_s;
            r.solution = std::move(again);
            r.polished = true;
        }
    }
    r.plan = std::move(plan);
    r.solve_seconds = elapsed_s(t0);
    return r;
}

// ------------------------------------------------------------------ auditor

AuditReport audit_controls(const Formulation& f, const DispatchPlan& plan, const std::vector<ControlStep>& controls,
                           std::size_t s, double tol) {
    AuditReport rep;
    const auto& d = f.design;
    const double dt = f.dt_hours;
    const double eps = f.epsilon;
    const double smin = d.storage_floor();
    const std::size_t K = controls.size();
    if (K != plan.horizon() || s >= f.potential_power.size() || f.potential_power[s].size() != K) {
        rep.violations.push_back("horizon mismatch between plan, controls and formulation");
        return rep;
    }
    auto check = [&](bool ok, const std::string& what, std::size_t k) {
        if (!ok) rep.violations.push_back(what + " at step " + std::to_string(k));
    };
    auto near = [&](double a, double b) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); };
    auto below_sw = [&](int z, double x, double thr) {  // z=1 iff x < thr with epsilon gap
        return z ? x <= thr - eps + tol : x >= thr - tol;
    };
    auto reached_sw = [&](int z, double x, double thr) { return z ? x >= thr - tol : x <= thr - eps + tol; };

    ControlStep prev;
    prev.soc = smin;
    for (std::size_t k = 0; k < K; ++k) {
        const ControlStep& c = controls[k];
        const double qp = f.potential_power[s][k];
        const double eta_c = d.condenser_fraction(k);

        check(near(c.e_rsu + c.phi_r, prev.e_rsu + dt * d.q_ru * c.d_rsu), "receiver startup energy balance", k);
        check(c.e_rsu <= d.e_r * c.d_rsu + tol, "receiver startup energy reset", k);
        check(c.phi_r <= d.e_r * prev.d_rsu + tol && c.phi_r <= d.e_r * (1 - c.d_rsu) + tol,
              "receiver startup slack", k);
        check(below_sw(c.z[0], qp, d.q_rl), "switch z1", k);
        check(reached_sw(c.z[1], c.e_rsu, d.e_r), "switch z2", k);
        check(c.d_rsu == logic::receiver_startup(plan.y_r[k], c.z[0], prev.z[1], prev.d_r), "receiver startup rule", k);
        check(c.d_rsup == (c.d_rsu && !prev.d_rsu), "receiver startup event", k);
        check(c.q_ract + d.q_ru * c.d_rsu + d.q_rsd * c.d_rsd <= qp + tol, "receiver power budget", k);
        check(c.q_ract >= d.q_rl * c.d_r - tol && c.q_ract <= d.q_rlim * c.d_r + tol, "receiver generation envelope",
              k);
        check(near(c.q_avail, qp - d.q_ru * c.d_rsu - d.q_rsd * c.d_rsd), "receiver available power", k);
        check(below_sw(c.z[2], c.q_avail, d.q_rl), "switch z3", k);
        check(c.d_r == logic::receiver_generation(plan.y_r[k], c.z[1], prev.d_r, c.z[2]), "receiver generation rule",
              k);
        check(near(c.q_avail_gen, qp * c.d_r - d.q_ru * c.d_rsu - d.q_rsd * c.d_rsd), "receiver generation power", k);
        check(below_sw(c.z[3], c.q_avail_gen, d.q_rl), "switch z4", k);
        check(below_sw(c.z[4], c.q_avail_gen, plan.q_r_hat[k]), "switch z5", k);
        check(near(c.q_ract, logic::receiver_charge(c.q_avail_gen, plan.q_r_hat[k], d.q_rl)), "receiver charge rule", k);
        if (k > 0) {
            check(prev.d_rsd >= prev.d_r - c.d_r, "receiver shutdown on last generating step", k - 1);
            check(prev.d_rsd + c.d_r <= 1, "receiver generation after shutdown", k);
        }
        check(c.d_rsd <= c.d_r, "receiver shutdown outside generation", k);
        check(!(plan.y_rsd[k] && c.d_r) || c.d_rsd, "planned receiver shutdown not executed", k);

        check(near(c.e_csu + c.phi_c, prev.e_csu + dt * d.q_c * c.d_csu), "power-block startup energy balance", k);
        check(c.phi_c <= d.e_c * prev.d_csu + tol && c.phi_c <= d.e_c * (1 - c.d_csu) + tol,
              "power-block startup slack", k);
        check(c.e_csu <= d.e_c * c.d_csu + tol, "power-block startup energy reset", k);
        check(reached_sw(c.z[5], c.e_csu, d.e_c), "switch z6", k);
        check(near(c.varphi, prev.soc - smin + dt * c.q_ract), "storage available for startup", k);
        check(below_sw(c.z[6], c.varphi, dt * d.q_c), "switch z7", k);
        check(c.d_csu == logic::pb_startup(plan.y_c[k], prev.d_c, prev.z[5], c.z[6]), "power-block startup rule", k);
        check(c.d_csup >= c.d_csu - prev.d_csu, "power-block startup event", k);
        check(c.d_c <= c.z[5] + prev.d_c, "power-block generation readiness", k);
        check(c.q_cact >= d.q_l * c.d_c - tol && c.q_cact <= d.q_u * c.d_c + tol, "power-block generation envelope",
              k);
        const double drawn = c.q_cact + d.q_c * c.d_csu;
        check(drawn <= plan.q_c_hat[k] + tol, "power-block draw above setpoint", k);
        check(!c.d_c || drawn >= plan.q_c_hat[k] - tol, "power-block setpoint tracking", k);
        check(near(c.soc, prev.soc + dt * (c.q_ract - drawn)), "storage balance", k);
        check(c.soc >= smin - tol && c.soc <= d.e_u + tol, "storage bounds", k);

        check(near(c.w, d.eta_p * c.q_cact + c.d_c * d.pb_intercept()), "gross output map", k);
        check(c.w_ramp >= std::abs(c.w - prev.w) - tol, "ramp magnitude", k);
        check(near(c.w_sold, c.w * (1.0 - eta_c)), "dispatched output", k);
        check(near(c.w_purch, d.l_r * (c.q_ract + d.q_ru * c.d_rsu) + d.l_c * c.q_cact + d.w_h * c.d_r +
                                  d.e_hs / dt * (c.d_rsd + c.d_rsu)),
              "purchased parasitics", k);
        check(!(plan.y_csd[k] && prev.d_c) || c.d_csd, "planned power-block shutdown not executed", k);
        check(c.d_csd >= prev.d_c - c.d_c, "power-block shutdown after generation", k);
        check(c.d_csd + c.d_c <= 1, "power-block shutdown during generation", k);
        prev = c;
    }
    return rep;
}

}  // namespace cst
