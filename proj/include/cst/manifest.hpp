#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cst/data.hpp"
#include "cst/sampling.hpp"

namespace cst {

// Output of the `sample` step. Scenario trajectories are embedded (full
// two-day windows) so a manifest can be optimised without the weather file.
struct ScenarioManifest {
    static constexpr int kSchemaVersion = 1;
    unsigned month = 1;
    std::uint64_t seed = 0;
    double dt_hours = 0.5;
    std::vector<Stratum> strata;
    std::vector<Scenario> scenarios;
    std::vector<std::string> sampling_ids;
    std::vector<std::string> testing_ids;

    std::vector<WeatherWindow> scenario_windows() const;
    nlohmann::json to_json() const;
    static ScenarioManifest from_json(const nlohmann::json& j);
};

ScenarioManifest make_manifest(const ScenarioSpace& space, unsigned month, double dt_hours,
                               const HistoryPartition& partition);

void write_manifest(const ScenarioManifest& m, const std::filesystem::path& path);
// IoError when unreadable or not JSON, ValidationError when fields are missing.
ScenarioManifest read_manifest(const std::filesystem::path& path);

// rank,window_id,e_in,cdf
std::string ecdf_csv(const EnergyEcdf& ecdf);

nlohmann::json trajectory_to_json(const WeatherTrajectory& t);
WeatherTrajectory trajectory_from_json(const nlohmann::json& j);

}  // namespace cst
