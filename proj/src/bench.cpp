#include "cst/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <spdlog/spdlog.h>

#include "cst/errors.hpp"
#include "cst/parallel.hpp"

namespace cst {

namespace {

std::string fmt_num(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::vector<TrajectoryRecord> evaluate_plan(const PlanningContext& ctx, const PlanSource& source,
                                            const std::vector<WeatherWindow>& windows) {
    std::vector<TrajectoryRecord> out(windows.size());
    parallel_for(windows.size(), ctx.jobs, [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        const WeatherTrajectory traj = ctx.horizon.apply(windows[i].traj);
        DispatchPlan pk;
        if (source.is_pk()) {
            PlanningContext inner = ctx;
            inner.jobs = 1;
            pk = perfect_knowledge(inner, traj).plan;
        }
        const DispatchPlan& plan = source.is_pk() ? pk : *source.fixed;
        const SimulationResult sim = simulate(ctx.plant, ctx.costs, plan, traj, ctx.prices, ctx.sim_options());
        TrajectoryRecord& r = out[i];
        r.window_id = windows[i].id;
        r.profit = sim.profit;
        r.events = sim.events;
        r.dispatched_mwh = sim.dispatched_mwh;
        r.sales_value = sim.sales_value;
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });
    return out;
}

std::optional<double> dwa_price(const std::vector<TrajectoryRecord>& records) {
    double energy = 0.0, value = 0.0;
    for (const auto& r : records) {
        energy += r.dispatched_mwh;
        value += r.sales_value;
    }
    if (!(energy > 0.0)) return std::nullopt;
    return value / energy;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw ValidationError("percentile of an empty list");
    if (p < 0.0 || p > 1.0) throw ValidationError("percentile rank must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

PercentileSummary percentile_summary(const std::vector<double>& values) {
    if (values.empty()) throw ValidationError("percentile summary of an empty list");
    PercentileSummary s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    s.median = percentile(values, 0.5);
    s.p025 = percentile(values, 0.025);
    s.p975 = percentile(values, 0.975);
    return s;
}

WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) throw ValidationError("Welch test needs at least two values per sample");
    auto moments = [](const std::vector<double>& x) {
        const double n = static_cast<double>(x.size());
        const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : x) ss += (v - m) * (v - m);
        return std::pair{m, ss / (n - 1.0)};
    };
    const auto [ma, va] = moments(a);
    const auto [mb, vb] = moments(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double sa = va / na, sb = vb / nb;
    const double se2 = sa + sb;
    if (!(se2 > 0.0)) throw ValidationError("Welch test is undefined when both samples have zero variance");
    WelchResult r;
    r.t = (ma - mb) / std::sqrt(se2);
    r.dof = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    boost::math::students_t dist(r.dof);
    r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
    return r;
}

ComponentValues components_of(const ProfitBreakdown& p) {
    return {p.revenue, p.purchase_cost, p.receiver_opex + p.receiver_sd_cost, p.pb_opex + p.pb_sd_cost, p.profit};
}

EvaluationReport build_report(const std::string& category, const std::vector<PlanEvaluation>& evaluations) {
    if (evaluations.empty()) throw ValidationError("report needs at least one plan");
    EvaluationReport rep;
    rep.category = category;
    for (const auto& r : evaluations.front().records) rep.window_ids.push_back(r.window_id);
    for (const auto& ev : evaluations) {
        if (ev.records.empty())
            throw ValidationError("plan " + ev.source.name + " has no evaluation records (empty weather set?)");
        PlanSummary s;
        s.name = ev.source.name;
        s.n = ev.records.size();
        std::vector<double> rev, pur, rc, pc, pr;
        double ev_rsup = 0, ev_rsd_p = 0, ev_rsd_f = 0, ev_csup = 0, ev_csd_p = 0, ev_csd_f = 0;
        for (const auto& r : ev.records) {
            const ComponentValues c = components_of(r.profit);
            rev.push_back(c.revenue);
            pur.push_back(c.purchase);
            rc.push_back(c.receiver_cost);
            pc.push_back(c.pb_cost);
            pr.push_back(c.profit);
            s.per_trajectory.push_back(c);
            s.window_ids.push_back(r.window_id);
            ev_rsup += r.events.rsup;
            ev_rsd_p += r.events.rsd_planned;
            ev_rsd_f += r.events.rsd_forced;
            ev_csup += r.events.csup;
            ev_csd_p += r.events.csd_planned;
            ev_csd_f += r.events.csd_forced;
            s.eval_seconds += r.seconds;
        }
        s.revenue = percentile_summary(rev);
        s.purchase = percentile_summary(pur);
        s.receiver_cost = percentile_summary(rc);
        s.pb_cost = percentile_summary(pc);
        s.profit = percentile_summary(pr);
        s.profits = pr;
        s.dwa = dwa_price(ev.records);
        const double n = static_cast<double>(s.n);
        s.event_means = {{"receiver_startups", ev_rsup / n},       {"receiver_shutdowns_planned", ev_rsd_p / n},
                         {"receiver_shutdowns_forced", ev_rsd_f / n}, {"pb_startups", ev_csup / n},
                         {"pb_shutdowns_planned", ev_csd_p / n},   {"pb_shutdowns_forced", ev_csd_f / n}};
        s.planning_seconds = ev.planning_seconds;
        rep.plans.push_back(std::move(s));
    }
    const std::size_t m = rep.plans.size();
    rep.p_values.assign(m, std::vector<double>(m, std::numeric_limits<double>::quiet_NaN()));
    for (std::size_t i = 0; i < m; ++i) {
        rep.p_values[i][i] = 1.0;
        for (std::size_t j = i + 1; j < m; ++j) {
            try {
                rep.p_values[i][j] = rep.p_values[j][i] = welch_t_test(rep.plans[i].profits, rep.plans[j].profits).p_value;
            } catch (const ValidationError&) {
                // left as NaN: too few trajectories or no spread in either plan
            }
        }
    }
    return rep;
}

double EvaluationReport::component_identity_error() const {
    double worst = 0.0;
    for (const auto& p : plans) {
        const double rebuilt = p.revenue.mean - p.purchase.mean - p.receiver_cost.mean - p.pb_cost.mean;
        worst = std::max(worst, std::abs(p.profit.mean - rebuilt));
    }
    return worst;
}

nlohmann::json EvaluationReport::to_json() const {
    using nlohmann::ordered_json;
    auto summary = [](const PercentileSummary& s) {
        return nlohmann::json{{"mean", s.mean}, {"median", s.median}, {"p2_5", s.p025}, {"p97_5", s.p975}};
    };
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["category"] = category;
    j["windows"] = window_ids;
    j["plans"] = nlohmann::json::array();
    for (const auto& p : plans) {
        nlohmann::json pj;
        pj["name"] = p.name;
        pj["trajectories"] = p.n;
        pj["revenue"] = summary(p.revenue);
        pj["purchase"] = summary(p.purchase);
        pj["receiver_cost"] = summary(p.receiver_cost);
        pj["pb_cost"] = summary(p.pb_cost);
        pj["profit"] = summary(p.profit);
        pj["dwa_price"] = p.dwa ? nlohmann::json(*p.dwa) : nlohmann::json(nullptr);
        pj["event_means"] = p.event_means;
        pj["runtime_s"] = {{"planning", p.planning_seconds}, {"evaluation", p.eval_seconds}};
        pj["profits"] = p.profits;
        j["plans"].push_back(std::move(pj));
    }
    nlohmann::json pv = nlohmann::json::array();
    for (const auto& row : p_values) {
        nlohmann::json r = nlohmann::json::array();
        for (double v : row) r.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
        pv.push_back(std::move(r));
    }
    j["t_test_p_values"] = std::move(pv);
    j["component_identity_error"] = component_identity_error();
    return j;
}

namespace {

std::string money(double v, bool cost) {
    if (cost && v != 0.0) return "(" + fmt_num("%.2f", std::abs(v)) + ")";
    return fmt_num("%.2f", v);
}

std::string money_short(double v, bool cost) {
    if (cost && v != 0.0) return "(" + fmt_num("%.0f", std::abs(v)) + ")";
    return fmt_num("%.0f", v);
}

std::string pad(const std::string& s, std::size_t w) {
    return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

}  // namespace

std::string EvaluationReport::to_text() const {
    const std::size_t w0 = 28, w = 20;
    std::string out = "Category: " + category + " (" + std::to_string(window_ids.size()) + " trajectories)\n\n";
    auto header = [&](const std::string& title) {
        std::string h = title + std::string(w0 > title.size() ? w0 - title.size() : 1, ' ');
        for (const auto& p : plans) h += pad(p.name, w);
        return h + "\n";
    };
    struct Row {
        const char* label;
        const PercentileSummary PlanSummary::*field;
        bool cost;
    };
    const Row rows[] = {{"Revenue", &PlanSummary::revenue, false},
                        {"Purchase", &PlanSummary::purchase, true},
                        {"Receiver cost", &PlanSummary::receiver_cost, true},
                        {"PB cost", &PlanSummary::pb_cost, true},
                        {"Profit", &PlanSummary::profit, false}};

    out += header("Expected values");
    for (const auto& r : rows) {
        std::string line = r.label;
        line += std::string(w0 - line.size(), ' ');
        for (const auto& p : plans) line += pad(money((p.*r.field).mean, r.cost), w);
        out += line + "\n";
    }
    std::string dwa = "DWA price";
    dwa += std::string(w0 - dwa.size(), ' ');
    for (const auto& p : plans) dwa += pad(p.dwa ? fmt_num("%.2f", *p.dwa) : "-", w);
    out += dwa + "\n\n";

    out += header("Median [2.5%, 97.5%]");
    for (const auto& r : rows) {
        std::string l1 = r.label, l2 = "";
        l1 += std::string(w0 - l1.size(), ' ');
        l2 += std::string(w0, ' ');
        for (const auto& p : plans) {
            const auto& s = p.*r.field;
            l1 += pad(money(s.median, r.cost), w);
            l2 += pad("[" + money_short(s.p025, r.cost) + ", " + money_short(s.p975, r.cost) + "]", w);
        }
        out += l1 + "\n" + l2 + "\n";
    }
    out += "\n";

    out += header("Mean events");
    if (!plans.empty()) {
        for (const auto& [key, unused] : plans.front().event_means) {
            (void)unused;
            std::string line = key.size() + 1 < w0 ? key + std::string(w0 - key.size(), ' ') : key + " ";
            for (const auto& p : plans) line += pad(fmt_num("%.2f", p.event_means.at(key)), w);
            out += line + "\n";
        }
    }
    out += "\n";

    out += header("Welch p-values");
    for (std::size_t i = 0; i < plans.size(); ++i) {
        std::string line = plans[i].name;
        line += std::string(w0 > line.size() ? w0 - line.size() : 1, ' ');
        for (std::size_t j = 0; j < plans.size(); ++j)
            line += pad(std::isnan(p_values[i][j]) ? "-" : fmt_num("%.4g", p_values[i][j]), w);
        out += line + "\n";
    }
    out += "\n";

    out += header("Runtime [s]");
    std::string plan_line = "planning", eval_line = "evaluation";
    plan_line += std::string(w0 - plan_line.size(), ' ');
    eval_line += std::string(w0 - eval_line.size(), ' ');
    for (const auto& p : plans) {
        plan_line += pad(fmt_num("%.2f", p.planning_seconds), w);
        eval_line += pad(fmt_num("%.2f", p.eval_seconds), w);
    }
    out += plan_line + "\n" + eval_line + "\n";
    return out;
}

std::string EvaluationReport::to_csv() const {
    std::string out = "plan,window_id,revenue,purchase,receiver_cost,pb_cost,profit\n";
    for (const auto& p : plans) {
        for (std::size_t i = 0; i < p.per_trajectory.size(); ++i) {
            const auto& c = p.per_trajectory[i];
            out += p.name + "," + p.window_ids[i];
            for (double v : {c.revenue, c.purchase, c.receiver_cost, c.pb_cost, c.profit}) out += fmt_num(",%.10g", v);
            out += "\n";
        }
    }
    return out;
}

std::string EvaluationReport::to_svg() const {
    const double width = 640, height = 360, left = 80, right = 20, top = 30, bottom = 50;
    double lo = 0.0, hi = 0.0;
    for (const auto& p : plans) {
        lo = std::min(lo, p.profit.mean);
        hi = std::max(hi, p.profit.mean);
    }
    if (hi == lo) hi = lo + 1.0;
    const double plot_h = height - top - bottom, plot_w = width - left - right;
    auto y_of = [&](double v) { return top + (hi - v) / (hi - lo) * plot_h; };
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_num("%.0f", width) + "\" height=\"" +
                    fmt_num("%.0f", height) + "\">\n";
    s += "<text x=\"" + fmt_num("%.0f", width / 2) + "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">Mean profit (" +
         xml_escape(category) + ")</text>\n";
    s += "<line x1=\"" + fmt_num("%.1f", left) + "\" y1=\"" + fmt_num("%.1f", y_of(0)) + "\" x2=\"" +
         fmt_num("%.1f", width - right) + "\" y2=\"" + fmt_num("%.1f", y_of(0)) + "\" stroke=\"black\"/>\n";
    const double slot = plans.empty() ? plot_w : plot_w / static_cast<double>(plans.size());
    for (std::size_t i = 0; i < plans.size(); ++i) {
        const double v = plans[i].profit.mean;
        const double x = left + slot * static_cast<double>(i) + slot * 0.15;
        const double y = std::min(y_of(v), y_of(0)), h = std::abs(y_of(v) - y_of(0));
        s += "<rect x=\"" + fmt_num("%.1f", x) + "\" y=\"" + fmt_num("%.1f", y) + "\" width=\"" +
             fmt_num("%.1f", slot * 0.7) + "\" height=\"" + fmt_num("%.1f", h) + "\" fill=\"" +
             (v >= 0 ? "#4878a8" : "#c05050") + "\"/>\n";
        s += "<text x=\"" + fmt_num("%.1f", x + slot * 0.35) + "\" y=\"" + fmt_num("%.1f", height - bottom + 18) +
             "\" text-anchor=\"middle\" font-size=\"12\">" + xml_escape(plans[i].name) + "</text>\n";
        s += "<text x=\"" + fmt_num("%.1f", x + slot * 0.35) + "\" y=\"" + fmt_num("%.1f", y - 4) +
             "\" text-anchor=\"middle\" font-size=\"10\">" + fmt_num("%.0f", v) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

std::vector<SensitivityRow> sensitivity_h2(const PlanningContext& ctx, const std::vector<WeatherWindow>& sampling,
                                           const std::vector<WeatherWindow>& testing,
                                           const std::vector<std::size_t>& sizes) {
    if (testing.empty()) throw ValidationError("sensitivity sweep needs a non-empty testing set");
    if (!std::is_sorted(sizes.begin(), sizes.end())) throw ValidationError("sensitivity sizes must be ascending");
    std::vector<SensitivityRow> rows;
    for (std::size_t n : sizes) {
        if (n == 0 || n > sampling.size()) {
            spdlog::warn("sensitivity size {} skipped: {} sampling windows available", n, sampling.size());
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        const HeuristicResult h2 = heuristic_2(ctx, sampling, n);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const auto recs = evaluate_plan(ctx, PlanSource::fixed_plan("H2", h2.plan), testing);
        double sum = 0.0;
        for (const auto& r : recs) sum += r.profit.profit;
        rows.push_back({n, sum / static_cast<double>(recs.size()), secs, h2.source_id});
    }
    return rows;
}

std::string sensitivity_csv(const std::vector<SensitivityRow>& rows) {
    std::string out = "subset_size,expected_profit,seconds,source_window\n";
    for (const auto& r : rows)
        out += std::to_string(r.size) + "," + fmt_num("%.10g", r.expected_profit) + "," + fmt_num("%.6g", r.seconds) +
               "," + r.source_id + "\n";
    return out;
}

std::string sensitivity_svg(const std::vector<SensitivityRow>& rows) {
    const double width = 640, height = 360, left = 80, right = 80, top = 30, bottom = 50;
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"360\">\n"
                    "<text x=\"320\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">Heuristic-2 subset sweep</text>\n";
    if (rows.empty()) return s + "</svg>\n";
    double xmin = static_cast<double>(rows.front().size), xmax = static_cast<double>(rows.back().size);
    if (xmax == xmin) xmax = xmin + 1;
    double pmin = rows.front().expected_profit, pmax = pmin, tmax = 0.0;
    for (const auto& r : rows) {
        pmin = std::min(pmin, r.expected_profit);
        pmax = std::max(pmax, r.expected_profit);
        tmax = std::max(tmax, r.seconds);
    }
    if (pmax == pmin) pmax = pmin + 1;
    if (tmax == 0) tmax = 1;
    const double pw = width - left - right, ph = height - top - bottom;
    auto xs = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto yp = [&](double v) { return top + (pmax - v) / (pmax - pmin) * ph; };
    auto yt = [&](double v) { return top + (tmax - v) / tmax * ph; };
    std::string profit_pts, time_pts;
    for (const auto& r : rows) {
        const double x = xs(static_cast<double>(r.size));
        profit_pts += fmt_num("%.1f", x) + "," + fmt_num("%.1f", yp(r.expected_profit)) + " ";
        time_pts += fmt_num("%.1f", x) + "," + fmt_num("%.1f", yt(r.seconds)) + " ";
    }
    s += "<rect x=\"" + fmt_num("%.0f", left) + "\" y=\"" + fmt_num("%.0f", top) + "\" width=\"" + fmt_num("%.0f", pw) +
         "\" height=\"" + fmt_num("%.0f", ph) + "\" fill=\"none\" stroke=\"#888\"/>\n";
    s += "<polyline fill=\"none\" stroke=\"#4878a8\" stroke-width=\"2\" points=\"" + profit_pts + "\"/>\n";
    s += "<polyline fill=\"none\" stroke=\"#c05050\" stroke-width=\"2\" stroke-dasharray=\"5,3\" points=\"" + time_pts +
         "\"/>\n";
    s += "<text x=\"10\" y=\"" + fmt_num("%.0f", top + 10) + "\" font-size=\"11\" fill=\"#4878a8\">" +
         fmt_num("%.0f", pmax) + "</text>\n";
    s += "<text x=\"10\" y=\"" + fmt_num("%.0f", top + ph) + "\" font-size=\"11\" fill=\"#4878a8\">" +
         fmt_num("%.0f", pmin) + "</text>\n";
    s += "<text x=\"" + fmt_num("%.0f", width - right + 6) + "\" y=\"" + fmt_num("%.0f", top + 10) +
         "\" font-size=\"11\" fill=\"#c05050\">" + fmt_num("%.1f", tmax) + " s</text>\n";
    s += "<text x=\"" + fmt_num("%.0f", left + pw / 2) + "\" y=\"" + fmt_num("%.0f", height - 15) +
         "\" text-anchor=\"middle\" font-size=\"12\">subset size (profit solid, wall-clock dashed)</text>\n";
    s += "</svg>\n";
    return s;
}

}  // namespace cst
