#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cst/data.hpp"
#include "cst/plant.hpp"

namespace cst {

struct EcdfEntry {
    std::size_t window_index;  // position in the window list the ECDF was built from
    std::string window_id;
    double e_in;
};

struct EnergyEcdf {
    std::vector<EcdfEntry> entries;  // ascending e_in, ties by window id
    std::size_t size() const { return entries.size(); }
};

EnergyEcdf build_ecdf(const std::vector<WeatherWindow>& windows, const Plant& plant);

struct Stratum {
    std::size_t first;  // inclusive ECDF rank
    std::size_t last;   // inclusive ECDF rank
    std::size_t size() const { return last - first + 1; }
};

struct Scenario {
    std::string window_id;
    WeatherTrajectory traj;
    double e_in = 0.0;
    std::size_t stratum = 0;
    std::size_t ecdf_rank = 0;
};

struct ScenarioSpace {
    std::vector<Scenario> scenarios;
    std::vector<Stratum> strata;
    std::uint64_t seed = 0;

    std::size_t n_s() const { return scenarios.size(); }
    std::vector<WeatherTrajectory> trajectories() const;
    std::vector<std::string> ids() const;
    void validate() const;
};

// Contiguous equal-count strata over [0, n): sizes differ by at most one,
// larger strata first.
std::vector<Stratum> equal_count_strata(std::size_t n, std::size_t n_s);

ScenarioSpace stratified_sample(const EnergyEcdf& ecdf, const std::vector<WeatherWindow>& windows,
                                std::size_t n_s, std::uint64_t seed);

struct MedoidResult {
    std::vector<std::size_t> medoids;     // sorted ascending
    std::vector<std::size_t> assignment;  // nearest medoid (position in `medoids`) per point
    double cost = 0.0;                    // sum of distances to nearest medoid
    std::vector<double> cost_history;     // after BUILD, then after every accepted swap
};

double euclidean(const std::vector<double>& a, const std::vector<double>& b);

MedoidResult k_medoids(const std::vector<std::vector<double>>& profiles, std::size_t k,
                       std::size_t max_iter, std::uint64_t seed);

}  // namespace cst
