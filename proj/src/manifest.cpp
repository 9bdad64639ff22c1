#include "cst/manifest.hpp"

#include <cstdio>
#include <fstream>

#include "cst/errors.hpp"

namespace cst {

using json = nlohmann::json;

json trajectory_to_json(const WeatherTrajectory& t) {
    json dni = json::array(), tamb = json::array(), wind = json::array();
    for (const auto& s : t.samples) {
        dni.push_back(s.dni);
        tamb.push_back(s.t_amb);
        wind.push_back(s.wind);
    }
    return {{"start", format_timestamp(t.start_timestamp)},
            {"dt_hours", t.dt_hours},
            {"dni", std::move(dni)},
            {"t_amb", std::move(tamb)},
            {"wind", std::move(wind)}};
}

WeatherTrajectory trajectory_from_json(const json& j) {
    try {
        WeatherTrajectory t;
        const auto start = parse_timestamp(j.at("start").get<std::string>());
        if (!start) throw ValidationError("bad trajectory start timestamp");
        t.start_timestamp = *start;
        t.dt_hours = j.at("dt_hours").get<double>();
        const auto dni = j.at("dni").get<std::vector<double>>();
        const auto tamb = j.at("t_amb").get<std::vector<double>>();
        const auto wind = j.at("wind").get<std::vector<double>>();
        if (dni.size() != tamb.size() || dni.size() != wind.size())
            throw ValidationError("trajectory arrays differ in length");
        for (std::size_t k = 0; k < dni.size(); ++k) t.samples.push_back({dni[k], tamb[k], wind[k]});
        t.validate();
        return t;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed trajectory: ") + e.what());
    }
}

std::vector<WeatherWindow> ScenarioManifest::scenario_windows() const {
    std::vector<WeatherWindow> out;
    for (const auto& s : scenarios) {
        const auto d = parse_date(s.window_id);
        out.push_back({s.window_id, d ? *d : date_of(s.traj.start_timestamp), s.traj});
    }
    return out;
}

json ScenarioManifest::to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["month"] = month;
    j["seed"] = seed;
    j["dt_hours"] = dt_hours;
    j["n_s"] = scenarios.size();
    j["strata"] = json::array();
    for (const auto& s : strata) j["strata"].push_back({{"first_rank", s.first}, {"last_rank", s.last}, {"size", s.size()}});
    j["scenarios"] = json::array();
    for (const auto& s : scenarios)
        j["scenarios"].push_back({{"window_id", s.window_id},
                                  {"e_in", s.e_in},
                                  {"stratum", s.stratum},
                                  {"ecdf_rank", s.ecdf_rank},
                                  {"trajectory", trajectory_to_json(s.traj)}});
    j["sampling_ids"] = sampling_ids;
    j["testing_ids"] = testing_ids;
    return j;
}

ScenarioManifest ScenarioManifest::from_json(const json& j) {
    try {
        ScenarioManifest m;
        if (j.at("schema_version").get<int>() != kSchemaVersion)
            throw ValidationError("unsupported manifest schema version");
        m.month = j.at("month").get<unsigned>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.dt_hours = j.at("dt_hours").get<double>();
        for (const auto& s : j.at("strata"))
            m.strata.push_back({s.at("first_rank").get<std::size_t>(), s.at("last_rank").get<std::size_t>()});
        for (const auto& s : j.at("scenarios")) {
            Scenario sc;
            sc.window_id = s.at("window_id").get<std::string>();
            sc.e_in = s.at("e_in").get<double>();
            sc.stratum = s.at("stratum").get<std::size_t>();
            sc.ecdf_rank = s.at("ecdf_rank").get<std::size_t>();
            sc.traj = trajectory_from_json(s.at("trajectory"));
            m.scenarios.push_back(std::move(sc));
        }
        m.sampling_ids = j.value("sampling_ids", std::vector<std::string>{});
        m.testing_ids = j.value("testing_ids", std::vector<std::string>{});
        if (m.scenarios.empty()) throw ValidationError("manifest lists no scenarios");
        return m;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed scenario manifest: ") + e.what());
    }
}

ScenarioManifest make_manifest(const ScenarioSpace& space, unsigned month, double dt_hours,
                               const HistoryPartition& partition) {
    ScenarioManifest m;
    m.month = month;
    m.seed = space.seed;
    m.dt_hours = dt_hours;
    m.strata = space.strata;
    m.scenarios = space.scenarios;
    m.sampling_ids = partition.sampling_ids;
    m.testing_ids = partition.testing_ids;
    return m;
}

void write_manifest(const ScenarioManifest& m, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write manifest " + path.string());
    f << m.to_json().dump(2) << '\n';
    if (!f) throw IoError("failed writing manifest " + path.string());
}

ScenarioManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read manifest " + path.string());
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw IoError("manifest " + path.string() + " is not valid JSON: " + e.what());
    }
    return ScenarioManifest::from_json(j);
}

std::string ecdf_csv(const EnergyEcdf& ecdf) {
    std::string out = "rank,window_id,e_in,cdf\n";
    char buf[128];
    const double n = static_cast<double>(ecdf.size());
    for (std::size_t i = 0; i < ecdf.size(); ++i) {
        const auto& e = ecdf.entries[i];
        std::snprintf(buf, sizeof buf, "%zu,%s,%.10g,%.10g\n", i, e.window_id.c_str(), e.e_in,
                      static_cast<double>(i + 1) / n);
        out += buf;
    }
    return out;
}

}  // namespace cst
