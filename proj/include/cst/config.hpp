#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cst/data.hpp"
#include "cst/formulation.hpp"
#include "cst/heuristics.hpp"
#include "cst/milp.hpp"
#include "cst/plant.hpp"

namespace cst {

struct WeatherSource {
    std::filesystem::path csv;  // resolved against the config file's directory
    CsvSchema schema;
    unsigned month = 1;
};

struct PriceConfig {
    double peak = 120.0;
    double offpeak = 40.0;
    std::vector<PeakWindow> peak_windows = {{17.0, 21.0}};
    std::string currency = "AUD";
};

struct SamplingConfig {
    std::size_t n_s = 3;
    std::uint64_t seed = 42;
};

struct HorizonConfig {
    double dt_hours = 0.5;
    std::size_t window_offset_steps = 0;
    std::size_t horizon_steps = 0;  // 0 = rest of the two-day window
};

struct HeuristicConfig {
    std::optional<std::size_t> h2_subset;
    std::uint64_t h3_seed = 0;
    std::vector<std::size_t> sensitivity_sizes = {5, 10, 20};
};

struct SyntheticConfig {
    std::uint64_t seed = 7;
    int first_year = 2016;
    int last_year = 2020;
    double dropout = 0.15;
    ClearSkyParams sky;
};

struct RunConfig {
    Plant plant;
    CostModel costs;
    PriceConfig prices;
    WeatherSource weather;
    SplitRule partition = YearSplit{2016, 2019, 2020, 2020};
    SamplingConfig sampling;
    HorizonConfig horizon;
    ModelOptions model;
    SolverConfig solver;
    HeuristicConfig heuristics;
    SyntheticConfig synthetic;
    std::filesystem::path output_dir = "runs";

    nlohmann::json user;      // what the file and overrides set
    nlohmann::json resolved;  // defaults merged with `user`

    // Steps in one optimisation horizon, given two-day windows.
    std::size_t horizon_length() const;
    double horizon_start_hour() const;
    PriceProfile price_profile() const;
    PlanningContext context(unsigned jobs) const;

    // Every leaf as {"value": ..., "source": "user" | "default"}.
    nlohmann::json echo() const;
};

// The full default configuration as JSON (also the schema: unknown keys
// anywhere in a user config are rejected).
const nlohmann::json& default_config_json();

// Throws ConfigError on unknown keys, wrong types or failed validation.
RunConfig parse_run_config(const nlohmann::json& user, const std::filesystem::path& base_dir = {});

// Throws IoError when the file is unreadable, ConfigError when it is not JSON.
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides = {});

// Applies "dotted.key=json-value" (bare words are taken as strings).
void apply_override(nlohmann::json& user, const std::string& assignment);

}  // namespace cst
