#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cst/plant.hpp"
#include "cst/timeutil.hpp"

namespace cst {

struct DroppedDay {
    Date day;
    std::string reason;
};

struct HistoryDatabase {
    double dt_hours = 0.5;
    std::map<Date, WeatherTrajectory> days;
    std::string location;
    std::vector<DroppedDay> dropped;

    std::size_t steps_per_day() const;
};

struct CsvSchema {
    std::string timestamp_column = "timestamp";
    std::string dni_column = "dni_wm2";
    std::string tamb_column = "tamb_c";
    std::string wind_column = "wind_ms";
    char delimiter = ',';
};

HistoryDatabase load_weather_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
void write_weather_csv(const HistoryDatabase& db, const std::filesystem::path& path,
                       const CsvSchema& schema = {});

// A two-day sequence starting at local midnight of `start`; the id is the
// ISO start date, so lexicographic id order is chronological order.
struct WeatherWindow {
    std::string id;
    Date start;
    WeatherTrajectory traj;
};

std::vector<WeatherWindow> build_two_day_windows(const HistoryDatabase& db, unsigned month);

struct YearSplit {
    int sampling_first;
    int sampling_last;
    int testing_first;
    int testing_last;
};

struct ExplicitSplit {
    std::vector<std::string> sampling_ids;
    std::vector<std::string> testing_ids;
};

using SplitRule = std::variant<YearSplit, ExplicitSplit>;

struct HistoryPartition {
    std::vector<std::string> sampling_ids;
    std::vector<std::string> testing_ids;
};

HistoryPartition partition_history(const std::vector<WeatherWindow>& windows, const SplitRule& rule);

// Windows whose id appears in `ids`, in the order of `ids`.
std::vector<WeatherWindow> select_windows(const std::vector<WeatherWindow>& windows,
                                          const std::vector<std::string>& ids);

struct PeakWindow {
    double start_hour;
    double end_hour;
};

struct PriceProfile {
    std::vector<double> prices;
    // Number of input windows that were merged into a neighbour because they overlapped.
    std::size_t merged_windows = 0;

    std::size_t size() const { return prices.size(); }
    void validate(std::size_t horizon) const;
};

// `start_hour` is the clock time of step 0 (0 for midnight-aligned horizons).
PriceProfile two_tier_price_profile(std::size_t horizon_k, double dt_hours,
                                    std::vector<PeakWindow> peak_windows, double peak_price,
                                    double offpeak_price, double start_hour = 0.0);

struct ClearSkyParams {
    Date start_date{std::chrono::year{2020}, std::chrono::January, std::chrono::day{1}};
    double dt_hours = 0.5;
    double peak_dni = 0.95;  // kW/m^2 at solar noon
    double sunrise_hour = 6.0;
    double sunset_hour = 19.0;
    double t_amb = 25.0;
    double wind = 3.0;
    // Each day's dropout probability is drawn uniformly from
    // [p - spread, p + spread] (clamped); zero gives the plain Bernoulli model.
    double dropout_spread = 0.0;
};

HistoryDatabase synthetic_weather(std::uint64_t seed, std::size_t days, const ClearSkyParams& params,
                                  double cloud_dropout_prob);

// Synthetic weather for `month` (plus the first day of the following month,
// so the last day can still open a two-day window) for every year in
// [first_year, last_year]. Each year uses its own derived seed.
HistoryDatabase synthetic_month_history(std::uint64_t seed, int first_year, int last_year,
                                        unsigned month, ClearSkyParams params,
                                        double cloud_dropout_prob);

}  // namespace cst
