#include "cst/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cst/errors.hpp"

namespace cst {

using json = nlohmann::json;

namespace {

struct DesignField {
    const char* key;
    double PlantDesign::*member;
};

constexpr DesignField kDesignFields[] = {
    {"n_helio", &PlantDesign::n_helio},   {"a_helio", &PlantDesign::a_helio},
    {"reflectance", &PlantDesign::reflectance_rho}, {"availability", &PlantDesign::availability_c},
    {"q_pipe", &PlantDesign::q_pipe},     {"q_ru", &PlantDesign::q_ru},
    {"e_r", &PlantDesign::e_r},           {"q_rl", &PlantDesign::q_rl},
    {"q_rlim", &PlantDesign::q_rlim},     {"q_rsd", &PlantDesign::q_rsd},
    {"q_c", &PlantDesign::q_c},           {"e_c", &PlantDesign::e_c},
    {"q_l", &PlantDesign::q_l},           {"q_u", &PlantDesign::q_u},
    {"w_l", &PlantDesign::w_l},           {"w_u", &PlantDesign::w_u},
    {"eta_p", &PlantDesign::eta_p},       {"e_u", &PlantDesign::e_u},
    {"soc_min", &PlantDesign::soc_min},   {"l_r", &PlantDesign::l_r},
    {"l_c", &PlantDesign::l_c},           {"w_h", &PlantDesign::w_h},
    {"e_hs", &PlantDesign::e_hs},
};

struct CostField {
    const char* key;
    double CostModel::*member;
};

constexpr CostField kCostFields[] = {
    {"receiver_opex", &CostModel::c_rec},          {"pb_opex", &CostModel::c_c},
    {"receiver_startup", &CostModel::c_rsup},      {"pb_startup", &CostModel::c_csup},
    {"ramp", &CostModel::c_dw},                    {"receiver_shutdown", &CostModel::alpha_r_sd},
    {"pb_shutdown", &CostModel::alpha_c_sd},       {"discount_per_step", &CostModel::lambda_discount},
};

json build_defaults() {
    json d = json::object();
    const PlantDesign pd;
    json plant = json::object();
    for (const auto& f : kDesignFields) plant[f.key] = pd.*f.member;
    plant["eta_c"] = pd.eta_c;
    d["plant"] = plant;

    const LossModel lm;
    d["loss"] = {{"radiative", lm.rad_coeffs}, {"convective", lm.conv_coeffs}, {"convective_wind", lm.conv_wind_coeffs}};
    // Either a constant or {"slot_hours": h, "months": [[...] x 12]}.
    d["optical_efficiency"] = 0.6;

    const CostModel cm;
    json costs = json::object();
    for (const auto& f : kCostFields) costs[f.key] = cm.*f.member;
    d["costs"] = costs;

    const PriceConfig pc;
    d["prices"] = {{"peak", pc.peak},
                   {"offpeak", pc.offpeak},
                   {"peak_windows", json::array({json::array({17.0, 21.0})})},
                   {"currency", pc.currency}};

    const CsvSchema cs;
    d["weather"] = {{"csv", "../data/synthetic_weather.csv"},
                    {"month", 1},
                    {"timestamp_column", cs.timestamp_column},
                    {"dni_column", cs.dni_column},
                    {"tamb_column", cs.tamb_column},
                    {"wind_column", cs.wind_column},
                    {"delimiter", ","}};
    d["partition"] = {{"mode", "years"},
                      {"sampling_years", {2016, 2019}},
                      {"testing_years", {2020, 2020}},
                      {"sampling_ids", json::array()},
                      {"testing_ids", json::array()}};
    d["sampling"] = {{"n_s", 3}, {"seed", 42}};
    d["horizon"] = {{"dt_hours", 0.5}, {"window_offset_steps", 0}, {"horizon_steps", 0}};
    d["model"] = {{"epsilon", 1e-3}, {"daylight_hours", nullptr}};
    const SolverConfig sc;
    d["solver"] = {{"backend", sc.backend},
                   {"time_limit_s", sc.time_limit_s},
                   {"mip_gap", sc.mip_gap_target},
                   {"threads", sc.threads},
                   {"integrality_tolerance", sc.binary_integrality_tolerance},
                   {"executable", sc.executable},
                   {"verbose", sc.verbose},
                   {"polish", true}};
    d["heuristics"] = {{"h2_subset", nullptr}, {"h3_seed", 0}, {"sensitivity_sizes", {5, 10, 20}}};
    const SyntheticConfig syn;
    d["synthetic"] = {{"seed", syn.seed},
                      {"first_year", syn.first_year},
                      {"last_year", syn.last_year},
                      {"dropout", syn.dropout},
                      {"dropout_spread", 0.15},
                      {"peak_dni", syn.sky.peak_dni},
                      {"sunrise_hour", syn.sky.sunrise_hour},
                      {"sunset_hour", syn.sky.sunset_hour},
                      {"t_amb", syn.sky.t_amb},
                      {"wind", syn.sky.wind}};
    d["output_dir"] = "runs";
    return d;
}

// Objects in the defaults are sections; everything else is a leaf that a
// user value replaces wholesale.
void merge_checked(json& target, const json& user, const std::string& path) {
    if (!user.is_object()) throw ConfigError("section '" + path + "' must be a JSON object");
    for (const auto& [key, value] : user.items()) {
        const std::string here = path.empty() ? key : path + "." + key;
        if (!target.contains(key)) throw ConfigError("unknown config key '" + here + "'");
        if (target[key].is_object())
            merge_checked(target[key], value, here);
        else
            target[key] = value;
    }
}

template <class T>
T get_as(const json& j, const std::string& path) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + path + "' has the wrong type (got " + std::string(j.type_name()) + ")");
    }
}

double num(const json& r, const std::string& sect, const char* key) {
    return get_as<double>(r.at(sect).at(key), sect + "." + key);
}

std::vector<double> num_list(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>()};
    return get_as<std::vector<double>>(j, path);
}

std::size_t count_of(const json& j, const std::string& path) {
    const auto v = get_as<long long>(j, path);
    if (v < 0) throw ConfigError("config key '" + path + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

OpticalEfficiencyTable parse_efficiency(const json& j) {
    if (j.is_number()) return OpticalEfficiencyTable::constant(j.get<double>());
    if (!j.is_object() || !j.contains("slot_hours") || !j.contains("months"))
        throw ConfigError("optical_efficiency must be a number or {slot_hours, months}");
    const auto rows = get_as<std::vector<std::vector<json>>>(j.at("months"), "optical_efficiency.months");
    if (rows.size() != 12) throw ConfigError("optical_efficiency.months needs 12 rows");
    std::array<std::vector<double>, 12> by_month;
    for (std::size_t m = 0; m < 12; ++m)
        for (const auto& v : rows[m])
            by_month[m].push_back(v.is_null() ? std::nan("") : get_as<double>(v, "optical_efficiency.months"));
    return OpticalEfficiencyTable::table(get_as<double>(j.at("slot_hours"), "optical_efficiency.slot_hours"),
                                         std::move(by_month));
}

void echo_walk(const json& resolved, const json* user, json& out) {
    for (const auto& [key, value] : resolved.items()) {
        const json* u = (user && user->is_object() && user->contains(key)) ? &(*user)[key] : nullptr;
        if (value.is_object()) {
            out[key] = json::object();
            echo_walk(value, u, out[key]);
        } else {
            out[key] = {{"value", value}, {"source", u ? "user" : "default"}};
        }
    }
}

}  // namespace

const json& default_config_json() {
    static const json d = build_defaults();
    return d;
}

RunConfig parse_run_config(const json& user, const std::filesystem::path& base_dir) {
    json r = default_config_json();
    merge_checked(r, user.is_null() ? json::object() : user, "");

    RunConfig c;
    c.user = user.is_null() ? json::object() : user;
    c.resolved = r;

    const json& p = r.at("plant");
    for (const auto& f : kDesignFields) c.plant.design.*f.member = get_as<double>(p.at(f.key), std::string("plant.") + f.key);
    c.plant.design.eta_c = num_list(p.at("eta_c"), "plant.eta_c");

    const json& l = r.at("loss");
    c.plant.loss.rad_coeffs = num_list(l.at("radiative"), "loss.radiative");
    c.plant.loss.conv_coeffs = num_list(l.at("convective"), "loss.convective");
    c.plant.loss.conv_wind_coeffs = num_list(l.at("convective_wind"), "loss.convective_wind");
    c.plant.eff = parse_efficiency(r.at("optical_efficiency"));

    for (const auto& f : kCostFields) c.costs.*f.member = num(r, "costs", f.key);

    const json& pr = r.at("prices");
    c.prices.peak = num(r, "prices", "peak");
    c.prices.offpeak = num(r, "prices", "offpeak");
    c.prices.currency = get_as<std::string>(pr.at("currency"), "prices.currency");
    c.prices.peak_windows.clear();
    for (const auto& w : get_as<std::vector<std::vector<double>>>(pr.at("peak_windows"), "prices.peak_windows")) {
        if (w.size() != 2) throw ConfigError("each prices.peak_windows entry must be [start_hour, end_hour]");
        c.prices.peak_windows.push_back({w[0], w[1]});
    }

    const json& w = r.at("weather");
    const auto csv = get_as<std::string>(w.at("csv"), "weather.csv");
    c.weather.csv = std::filesystem::path(csv).is_absolute() || base_dir.empty() ? std::filesystem::path(csv)
                                                                                : base_dir / csv;
    const auto month = get_as<int>(w.at("month"), "weather.month");
    if (month < 1 || month > 12) throw ConfigError("weather.month must lie in 1..12");
    c.weather.month = static_cast<unsigned>(month);
    c.weather.schema.timestamp_column = get_as<std::string>(w.at("timestamp_column"), "weather.timestamp_column");
    c.weather.schema.dni_column = get_as<std::string>(w.at("dni_column"), "weather.dni_column");
    c.weather.schema.tamb_column = get_as<std::string>(w.at("tamb_column"), "weather.tamb_column");
    c.weather.schema.wind_column = get_as<std::string>(w.at("wind_column"), "weather.wind_column");
    const auto delim = get_as<std::string>(w.at("delimiter"), "weather.delimiter");
    if (delim.size() != 1) throw ConfigError("weather.delimiter must be a single character");
    c.weather.schema.delimiter = delim[0];

    const json& pa = r.at("partition");
    const auto mode = get_as<std::string>(pa.at("mode"), "partition.mode");
    if (mode == "years") {
        const auto s = get_as<std::vector<int>>(pa.at("sampling_years"), "partition.sampling_years");
        const auto t = get_as<std::vector<int>>(pa.at("testing_years"), "partition.testing_years");
        if (s.size() != 2 || t.size() != 2) throw ConfigError("partition year ranges must be [first, last]");
        c.partition = YearSplit{s[0], s[1], t[0], t[1]};
    } else if (mode == "explicit") {
        c.partition = ExplicitSplit{get_as<std::vector<std::string>>(pa.at("sampling_ids"), "partition.sampling_ids"),
                                    get_as<std::vector<std::string>>(pa.at("testing_ids"), "partition.testing_ids")};
    } else {
        throw ConfigError("partition.mode must be 'years' or 'explicit'");
    }

    const json& sa = r.at("sampling");
    c.sampling.n_s = count_of(sa.at("n_s"), "sampling.n_s");
    if (c.sampling.n_s == 0) throw ConfigError("sampling.n_s must be at least 1");
    c.sampling.seed = get_as<std::uint64_t>(sa.at("seed"), "sampling.seed");

    const json& h = r.at("horizon");
    c.horizon.dt_hours = num(r, "horizon", "dt_hours");
    c.horizon.window_offset_steps = count_of(h.at("window_offset_steps"), "horizon.window_offset_steps");
    c.horizon.horizon_steps = count_of(h.at("horizon_steps"), "horizon.horizon_steps");
    if (!(c.horizon.dt_hours > 0) || std::abs(24.0 / c.horizon.dt_hours - std::round(24.0 / c.horizon.dt_hours)) > 1e-9)
        throw ConfigError("horizon.dt_hours must divide 24 h");
    const std::size_t window_steps = static_cast<std::size_t>(std::llround(48.0 / c.horizon.dt_hours));
    if (c.horizon.window_offset_steps + c.horizon.horizon_steps > window_steps ||
        c.horizon.window_offset_steps >= window_steps)
        throw ConfigError("horizon offset plus length exceed the two-day window");

    const json& mo = r.at("model");
    c.model.epsilon = num(r, "model", "epsilon");
    if (!(c.model.epsilon > 0)) throw ConfigError("model.epsilon must be positive");
    if (!mo.at("daylight_hours").is_null()) {
        const auto dh = get_as<std::vector<double>>(mo.at("daylight_hours"), "model.daylight_hours");
        if (dh.size() != 2 || !(dh[0] < dh[1])) throw ConfigError("model.daylight_hours must be [rise, set] with rise < set");
        c.model.daylight_hours = std::pair{dh[0], dh[1]};
    }

    const json& so = r.at("solver");
    c.solver.backend = get_as<std::string>(so.at("backend"), "solver.backend");
    c.solver.time_limit_s = get_as<double>(so.at("time_limit_s"), "solver.time_limit_s");
    c.solver.mip_gap_target = get_as<double>(so.at("mip_gap"), "solver.mip_gap");
    c.solver.threads = get_as<int>(so.at("threads"), "solver.threads");
    c.solver.binary_integrality_tolerance = get_as<double>(so.at("integrality_tolerance"), "solver.integrality_tolerance");
    c.solver.executable = get_as<std::string>(so.at("executable"), "solver.executable");
    c.solver.verbose = get_as<bool>(so.at("verbose"), "solver.verbose");
    c.solver.validate();

    const json& he = r.at("heuristics");
    if (!he.at("h2_subset").is_null()) c.heuristics.h2_subset = count_of(he.at("h2_subset"), "heuristics.h2_subset");
    c.heuristics.h3_seed = get_as<std::uint64_t>(he.at("h3_seed"), "heuristics.h3_seed");
    c.heuristics.sensitivity_sizes = get_as<std::vector<std::size_t>>(he.at("sensitivity_sizes"), "heuristics.sensitivity_sizes");

    const json& sy = r.at("synthetic");
    c.synthetic.seed = get_as<std::uint64_t>(sy.at("seed"), "synthetic.seed");
    c.synthetic.first_year = get_as<int>(sy.at("first_year"), "synthetic.first_year");
    c.synthetic.last_year = get_as<int>(sy.at("last_year"), "synthetic.last_year");
    c.synthetic.dropout = num(r, "synthetic", "dropout");
    c.synthetic.sky.dropout_spread = num(r, "synthetic", "dropout_spread");
    c.synthetic.sky.peak_dni = num(r, "synthetic", "peak_dni");
    c.synthetic.sky.sunrise_hour = num(r, "synthetic", "sunrise_hour");
    c.synthetic.sky.sunset_hour = num(r, "synthetic", "sunset_hour");
    c.synthetic.sky.t_amb = num(r, "synthetic", "t_amb");
    c.synthetic.sky.wind = num(r, "synthetic", "wind");
    c.synthetic.sky.dt_hours = c.horizon.dt_hours;

    c.output_dir = get_as<std::string>(r.at("output_dir"), "output_dir");
    if (c.output_dir.is_relative() && !base_dir.empty()) c.output_dir = base_dir / c.output_dir;

    try {
        c.plant.design.validate_for_step(c.horizon.dt_hours);
        c.plant.loss.validate();
        c.plant.eff.check_step(c.horizon.dt_hours);
        c.costs.validate();
        (void)c.price_profile();
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read config file " + path.string());
    json user;
    try {
        user = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    for (const auto& o : overrides) apply_override(user, o);
    return parse_run_config(user, path.parent_path());
}

void apply_override(json& user, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key.path=value: " + assignment);
    const std::string path = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &user;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object()) throw ConfigError("override path crosses a non-object: " + path);
        node = &(*node)[parts[i]];
        if (node->is_null()) *node = json::object();
    }
    (*node)[parts.back()] = value;
}

std::size_t RunConfig::horizon_length() const {
    const auto window = static_cast<std::size_t>(std::llround(48.0 / horizon.dt_hours));
    return horizon.horizon_steps ? horizon.horizon_steps : window - horizon.window_offset_steps;
}

double RunConfig::horizon_start_hour() const {
    return horizon.dt_hours * static_cast<double>(horizon.window_offset_steps);
}

PriceProfile RunConfig::price_profile() const {
    return two_tier_price_profile(horizon_length(), horizon.dt_hours, prices.peak_windows, prices.peak, prices.offpeak,
                                  horizon_start_hour());
}

PlanningContext RunConfig::context(unsigned jobs) const {
    PlanningContext ctx;
    ctx.plant = plant;
    ctx.costs = costs;
    ctx.prices = price_profile();
    ctx.model = model;
    ctx.solver = solver;
    ctx.horizon = HorizonSpec{horizon.window_offset_steps, horizon.horizon_steps};
    ctx.jobs = jobs == 0 ? 1 : jobs;
    ctx.polish = resolved.at("solver").at("polish").get<bool>();
    return ctx;
}

json RunConfig::echo() const {
    json out = json::object();
    echo_walk(resolved, &user, out);
    return out;
}

}  // namespace cst
