#include "cst/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cst/errors.hpp"
#include "cst/random.hpp"

namespace cst {

EnergyEcdf build_ecdf(const std::vector<WeatherWindow>& windows, const Plant& plant) {
    if (windows.empty()) throw ValidationError("cannot build an ECDF from zero windows");
    EnergyEcdf ecdf;
    ecdf.entries.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i)
        ecdf.entries.push_back(
            {i, windows[i].id, scenario_potential_energy(windows[i].traj, plant.design, plant.loss, plant.eff)});
    std::stable_sort(ecdf.entries.begin(), ecdf.entries.end(), [](const EcdfEntry& a, const EcdfEntry& b) {
        if (a.e_in != b.e_in) return a.e_in < b.e_in;
        return a.window_id < b.window_id;
    });
    return ecdf;
}

std::vector<WeatherTrajectory> ScenarioSpace::trajectories() const {
    std::vector<WeatherTrajectory> out;
    out.reserve(scenarios.size());
    for (const auto& s : scenarios) out.push_back(s.traj);
    return out;
}

std::vector<std::string> ScenarioSpace::ids() const {
    std::vector<std::string> out;
    for (const auto& s : scenarios) out.push_back(s.window_id);
    return out;
}

void ScenarioSpace::validate() const {
    if (scenarios.empty()) throw ValidationError("scenario space is empty");
    const auto& first = scenarios.front().traj;
    for (const auto& s : scenarios) {
        s.traj.validate();
        if (s.traj.size() != first.size() || s.traj.dt_hours != first.dt_hours)
            throw ValidationError("scenario trajectories differ in length or step");
    }
}

std::vector<Stratum> equal_count_strata(std::size_t n, std::size_t n_s) {
    if (n_s == 0 || n_s > n)
        throw ValidationError("need 1 <= n_s <= " + std::to_string(n) + ", got " + std::to_string(n_s));
    std::vector<Stratum> out;
    const std::size_t base = n / n_s, extra = n % n_s;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n_s; ++i) {
        const std::size_t len = base + (i < extra ? 1 : 0);
        out.push_back({pos, pos + len - 1});
        pos += len;
    }
    return out;
}

ScenarioSpace stratified_sample(const EnergyEcdf& ecdf, const std::vector<WeatherWindow>& windows,
                                std::size_t n_s, std::uint64_t seed) {
    ScenarioSpace space;
    space.seed = seed;
    space.strata = equal_count_strata(ecdf.size(), n_s);
    Rng rng(seed);
    for (std::size_t i = 0; i < space.strata.size(); ++i) {
        const auto& st = space.strata[i];
        const std::size_t rank = st.first + static_cast<std::size_t>(rng.below(st.size()));
        const auto& e = ecdf.entries[rank];
        if (e.window_index >= windows.size() || windows[e.window_index].id != e.window_id)
            throw ValidationError("ECDF does not match the window list it is sampled against");
        space.scenarios.push_back({e.window_id, windows[e.window_index].traj, e.e_in, i, rank});
    }
    return space;
}

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ValidationError("profiles differ in length");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

namespace {

struct Assign {
    double cost;
    std::vector<std::size_t> nearest;
};

Assign assign(const std::vector<std::vector<double>>& dist, const std::vector<std::size_t>& medoids) {
    const std::size_t n = dist.size();
    Assign a{0.0, std::vector<std::size_t>(n, 0)};
    for (std::size_t j = 0; j < n; ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < medoids.size(); ++m) {
            if (dist[medoids[m]][j] < best) {
                best = dist[medoids[m]][j];
                a.nearest[j] = m;
            }
        }
        a.cost += best;
    }
    return a;
}

}  // namespace

MedoidResult k_medoids(const std::vector<std::vector<double>>& profiles, std::size_t k,
                       std::size_t max_iter, std::uint64_t seed) {
    const std::size_t n = profiles.size();
    if (k == 0 || k > n) throw ValidationError("k-medoids needs 1 <= k <= number of profiles");

    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = euclidean(profiles[i], profiles[j]);

    // Evaluation order for candidates; only affects which of several equal
    // options wins.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    // BUILD: greedily add the point that lowers total cost the most.
    std::vector<std::size_t> medoids;
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::vector<char> is_medoid(n, 0);
    while (medoids.size() < k) {
        double best_cost = std::numeric_limits<double>::infinity();
        std::size_t best = n;
        for (std::size_t c : order) {
            if (is_medoid[c]) continue;
            double cost = 0.0;
            for (std::size_t j = 0; j < n; ++j) cost += std::min(nearest[j], dist[c][j]);
            if (cost < best_cost) {
                best_cost = cost;
                best = c;
            }
        }
        medoids.push_back(best);
        is_medoid[best] = 1;
        for (std::size_t j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], dist[best][j]);
    }

    MedoidResult res;
    double current = assign(dist, medoids).cost;
    res.cost_history.push_back(current);

    // SWAP: steepest descent over (medoid, non-medoid) exchanges.
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        double best_cost = current;
        std::size_t best_m = k, best_o = n;
        for (std::size_t m = 0; m < k; ++m) {
            for (std::size_t o : order) {
                if (is_medoid[o]) continue;
                auto trial = medoids;
                trial[m] = o;
                const double c = assign(dist, trial).cost;
                if (c < best_cost - 1e-12) {
                    best_cost = c;
                    best_m = m;
                    best_o = o;
                }
            }
        }
        if (best_m == k) break;
        is_medoid[medoids[best_m]] = 0;
        is_medoid[best_o] = 1;
        medoids[best_m] = best_o;
        current = best_cost;
        res.cost_history.push_back(current);
    }

    std::sort(medoids.begin(), medoids.end());
    const auto a = assign(dist, medoids);
    res.medoids = medoids;
    res.assignment = a.nearest;
    res.cost = a.cost;
    return res;
}

}  // namespace cst
