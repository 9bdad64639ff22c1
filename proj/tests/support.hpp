#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cst/data.hpp"
#include "cst/heuristics.hpp"
#include "cst/random.hpp"

namespace cst::testing {

// Desk-scale setup shared by the slower tests: 12 h horizon (24 half-hour
// steps from 09:00), default plant and costs, two-tier prices.
inline constexpr std::size_t kDeskOffset = 18;
inline constexpr std::size_t kDeskSteps = 24;

inline PriceProfile desk_prices() {
    return two_tier_price_profile(kDeskSteps, 0.5, {{17.0, 21.0}}, 120.0, 40.0, 9.0);
}

inline PlanningContext desk_context() {
    PlanningContext ctx;
    ctx.prices = desk_prices();
    ctx.solver.mip_gap_target = 0.005;
    ctx.solver.time_limit_s = 600.0;
    ctx.solver.threads = 1;
    ctx.horizon = HorizonSpec{kDeskOffset, kDeskSteps};
    ctx.jobs = 1;
    return ctx;
}

// Two-day January windows from a synthetic history.
inline std::vector<WeatherWindow> synthetic_windows(std::uint64_t seed, int first_year, int last_year,
                                                    double dropout = 0.15) {
    const auto db = synthetic_month_history(seed, first_year, last_year, 1, ClearSkyParams{}, dropout);
    return build_two_day_windows(db, 1);
}

// A valid plan drawn at random: on/off blocks with marked start/stop steps
// and setpoints uniform inside their envelopes.
inline DispatchPlan random_plan(Rng& rng, std::size_t K, const PlantDesign& d, std::size_t max_block = 12,
                                bool with_power_block = true) {
    DispatchPlan p = DispatchPlan::all_off(K);
    auto blocks = [&](std::vector<int>& on) {
        std::size_t k = 0;
        while (k < K) {
            const std::size_t gap = rng.below(6);
            const std::size_t len = 1 + rng.below(max_block);
            k += gap;
            for (std::size_t j = k; j < std::min(K, k + len); ++j) on[j] = 1;
            k += len + 1;  // at least one idle step between blocks
        }
    };
    blocks(p.y_r);
    if (with_power_block) blocks(p.y_c);
    for (std::size_t k = 0; k < K; ++k) {
        const int yr_prev = k ? p.y_r[k - 1] : 0;
        const int yc_prev = k ? p.y_c[k - 1] : 0;
        p.y_rsup[k] = p.y_r[k] && !yr_prev;
        p.y_rsd[k] = p.y_r[k] && (k + 1 == K || !p.y_r[k + 1]);
        p.y_csup[k] = p.y_c[k] && !yc_prev;
        p.y_csd[k] = yc_prev && !p.y_c[k];
        if (p.y_r[k] && !p.y_rsup[k]) p.q_r_hat[k] = d.q_rl + rng.uniform01() * (d.q_rlim - d.q_rl);
        if (p.y_csup[k]) p.q_c_hat[k] = d.q_c;
        else if (p.y_c[k]) p.q_c_hat[k] = d.q_l + rng.uniform01() * (d.q_u - d.q_l);
    }
    return p;
}

// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        Rng rng(static_cast<std::uint64_t>(std::hash<std::string>{}(tag)) ^
                static_cast<std::uint64_t>(reinterpret_cast<std::uintptr_t>(this)));
        path_ = std::filesystem::temp_directory_path() / ("cst_" + tag + "_" + std::to_string(rng.next_u64() % 1000000007ULL));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace cst::testing
