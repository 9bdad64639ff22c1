#include "cst/data.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cst/errors.hpp"
#include "cst/random.hpp"

namespace cst {
namespace {

std::vector<std::string_view> split_line(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(delim, pos);
        out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    for (auto& f : out) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
    }
    return out;
}

std::optional<double> parse_number(std::string_view s) {
    double v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::size_t column_index(const std::vector<std::string_view>& header, const std::string& name,
                         const std::string& file) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ParseError(file, 1, "missing column '" + name + "'");
}

struct Row {
    Timestamp t;
    WeatherSample s;
    std::size_t line;
};

}  // namespace

std::size_t HistoryDatabase::steps_per_day() const {
    return static_cast<std::size_t>(std::llround(24.0 / dt_hours));
}

HistoryDatabase load_weather_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open weather file " + path.string());
    const std::string file = path.string();

    std::string line;
    if (!std::getline(in, line)) throw ParseError(file, 1, "empty file");
    const auto header = split_line(line, schema.delimiter);
    const std::size_t c_ts = column_index(header, schema.timestamp_column, file);
    const std::size_t c_dni = column_index(header, schema.dni_column, file);
    const std::size_t c_tamb = column_index(header, schema.tamb_column, file);
    const std::size_t c_wind = column_index(header, schema.wind_column, file);
    const std::size_t need = std::max({c_ts, c_dni, c_tamb, c_wind}) + 1;

    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split_line(line, schema.delimiter);
        if (f.size() < need) throw ParseError(file, line_no, "expected at least " + std::to_string(need) + " fields");
        const auto t = parse_timestamp(f[c_ts]);
        if (!t) throw ParseError(file, line_no, "bad timestamp '" + std::string(f[c_ts]) + "'");
        const auto dni = parse_number(f[c_dni]);
        if (!dni || *dni < 0) throw ParseError(file, line_no, "bad DNI value '" + std::string(f[c_dni]) + "'");
        const auto tamb = parse_number(f[c_tamb]);
        if (!tamb) throw ParseError(file, line_no, "bad ambient temperature '" + std::string(f[c_tamb]) + "'");
        const auto wind = parse_number(f[c_wind]);
        if (!wind || *wind < 0) throw ParseError(file, line_no, "bad wind speed '" + std::string(f[c_wind]) + "'");
        rows.push_back({*t, WeatherSample{*dni / 1000.0, *tamb, *wind}, line_no});
    }
    if (rows.size() < 2) throw ParseError(file, line_no, "need at least two rows to infer the step");

    const auto step = rows[1].t - rows[0].t;
    if (step.count() <= 0 || (86400 % step.count()) != 0)
        throw ParseError(file, rows[1].line, "step must be positive and divide 24 h");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto d = rows[i].t - rows[i - 1].t;
        if (d.count() <= 0 || d.count() % step.count() != 0)
            throw ParseError(file, rows[i].line, "irregular time step");
    }
    if ((rows[0].t - midnight(date_of(rows[0].t))).count() % step.count() != 0)
        throw ParseError(file, rows[0].line, "timestamps are not aligned to the step grid");

    HistoryDatabase db;
    db.dt_hours = static_cast<double>(step.count()) / 3600.0;
    const std::size_t per_day = db.steps_per_day();

    std::map<Date, std::vector<std::optional<WeatherSample>>> slots;
    for (const auto& r : rows) {
        const Date d = date_of(r.t);
        auto& v = slots[d];
        if (v.empty()) v.resize(per_day);
        const auto idx = static_cast<std::size_t>((r.t - midnight(d)).count() / step.count());
        v[idx] = r.s;
    }
    for (auto& [day, v] : slots) {
        const auto missing = static_cast<std::size_t>(std::count(v.begin(), v.end(), std::nullopt));
        if (missing > 0) {
            db.dropped.push_back({day, std::to_string(missing) + " missing step(s)"});
            spdlog::warn("weather: dropping {} ({} missing steps)", format_date(day), missing);
            continue;
        }
        WeatherTrajectory traj;
        traj.start_timestamp = midnight(day);
        traj.dt_hours = db.dt_hours;
        traj.samples.reserve(per_day);
        for (auto& s : v) traj.samples.push_back(*s);
        db.days.emplace(day, std::move(traj));
    }
    return db;
}

void write_weather_csv(const HistoryDatabase& db, const std::filesystem::path& path,
                       const CsvSchema& schema) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write weather file " + path.string());
    const char d = schema.delimiter;
    out << schema.timestamp_column << d << schema.dni_column << d << schema.tamb_column << d
        << schema.wind_column << '\n';
    char buf[64];
    for (const auto& [day, traj] : db.days) {
        for (std::size_t k = 0; k < traj.size(); ++k) {
            const auto& s = traj.samples[k];
            out << format_timestamp(traj.time_at(k)) << d;
            std::snprintf(buf, sizeof buf, "%.10g", s.dni * 1000.0);
            out << buf << d;
            std::snprintf(buf, sizeof buf, "%.10g", s.t_amb);
            out << buf << d;
            std::snprintf(buf, sizeof buf, "%.10g", s.wind);
            out << buf << '\n';
        }
    }
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<WeatherWindow> build_two_day_windows(const HistoryDatabase& db, unsigned month) {
    if (db.days.empty()) throw ValidationError("weather database is empty");
    std::vector<WeatherWindow> out;
    for (const auto& [day, traj] : db.days) {
        if (static_cast<unsigned>(day.month()) != month) continue;
        const Date next{std::chrono::sys_days{day} + std::chrono::days{1}};
        const auto it = db.days.find(next);
        if (it == db.days.end()) continue;
        WeatherWindow w;
        w.id = format_date(day);
        w.start = day;
        w.traj.start_timestamp = traj.start_timestamp;
        w.traj.dt_hours = db.dt_hours;
        w.traj.samples = traj.samples;
        w.traj.samples.insert(w.traj.samples.end(), it->second.samples.begin(), it->second.samples.end());
        out.push_back(std::move(w));
    }
    if (out.empty()) spdlog::warn("weather: no two-day windows start in month {}", month);
    return out;
}

HistoryPartition partition_history(const std::vector<WeatherWindow>& windows, const SplitRule& rule) {
    HistoryPartition p;
    if (const auto* ys = std::get_if<YearSplit>(&rule)) {
        if (ys->sampling_first > ys->sampling_last || ys->testing_first > ys->testing_last)
            throw ValidationError("year ranges must be ascending");
        if (!(ys->sampling_last < ys->testing_first || ys->testing_last < ys->sampling_first))
            throw ValidationError("sampling and testing year ranges overlap");
        for (const auto& w : windows) {
            const int y = static_cast<int>(w.start.year());
            if (y >= ys->sampling_first && y <= ys->sampling_last) p.sampling_ids.push_back(w.id);
            else if (y >= ys->testing_first && y <= ys->testing_last) p.testing_ids.push_back(w.id);
        }
    } else {
        const auto& ex = std::get<ExplicitSplit>(rule);
        std::set<std::string> known;
        for (const auto& w : windows) known.insert(w.id);
        std::set<std::string> seen;
        for (const auto& id : ex.sampling_ids) {
            if (!known.count(id)) throw ValidationError("unknown window id in sampling list: " + id);
            seen.insert(id);
        }
        for (const auto& id : ex.testing_ids) {
            if (!known.count(id)) throw ValidationError("unknown window id in testing list: " + id);
            if (seen.count(id)) throw ValidationError("window " + id + " is in both sampling and testing lists");
        }
        p.sampling_ids = ex.sampling_ids;
        p.testing_ids = ex.testing_ids;
        std::sort(p.sampling_ids.begin(), p.sampling_ids.end());
        std::sort(p.testing_ids.begin(), p.testing_ids.end());
        p.sampling_ids.erase(std::unique(p.sampling_ids.begin(), p.sampling_ids.end()), p.sampling_ids.end());
        p.testing_ids.erase(std::unique(p.testing_ids.begin(), p.testing_ids.end()), p.testing_ids.end());
    }
    if (p.sampling_ids.empty()) throw ValidationError("partition leaves the sampling set empty");

    std::vector<std::string> both;
    std::set_intersection(p.sampling_ids.begin(), p.sampling_ids.end(), p.testing_ids.begin(),
                          p.testing_ids.end(), std::back_inserter(both));
    if (!both.empty()) throw ValidationError("partition is not disjoint");
    return p;
}

std::vector<WeatherWindow> select_windows(const std::vector<WeatherWindow>& windows,
                                          const std::vector<std::string>& ids) {
    std::map<std::string, const WeatherWindow*> by_id;
    for (const auto& w : windows) by_id[w.id] = &w;
    std::vector<WeatherWindow> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw ValidationError("no weather window with id " + id);
        out.push_back(*it->second);
    }
    return out;
}

void PriceProfile::validate(std::size_t horizon) const {
    if (prices.size() != horizon)
        throw ValidationError("price profile has " + std::to_string(prices.size()) +
                              " steps, horizon is " + std::to_string(horizon));
    for (double p : prices)
        if (!(p >= 0)) throw ValidationError("prices must be non-negative");
}

PriceProfile two_tier_price_profile(std::size_t horizon_k, double dt, std::vector<PeakWindow> windows,
                                    double peak_price, double offpeak_price, double start_hour) {
    if (!(dt > 0)) throw ConfigError("price step must be positive");
    if (!(offpeak_price >= 0) || peak_price < offpeak_price)
        throw ConfigError("need peak_price >= offpeak_price >= 0");
    for (const auto& w : windows)
        if (!(w.start_hour >= 0 && w.start_hour < w.end_hour && w.end_hour <= 24))
            throw ConfigError("peak windows must satisfy 0 <= start < end <= 24");

    PriceProfile out;
    std::sort(windows.begin(), windows.end(),
              [](const PeakWindow& a, const PeakWindow& b) { return a.start_hour < b.start_hour; });
    std::vector<PeakWindow> merged;
    for (const auto& w : windows) {
        if (!merged.empty() && w.start_hour < merged.back().end_hour) {
            merged.back().end_hour = std::max(merged.back().end_hour, w.end_hour);
            ++out.merged_windows;
            spdlog::warn("prices: overlapping peak windows merged");
        } else {
            merged.push_back(w);
        }
    }
    out.prices.resize(horizon_k);
    for (std::size_t k = 0; k < horizon_k; ++k) {
        // Rounded to whole seconds so step boundaries compare exactly.
        const double secs = std::round((start_hour + dt * static_cast<double>(k)) * 3600.0);
        const double h = std::fmod(secs, 86400.0) / 3600.0;
        bool peak = false;
        for (const auto& w : merged)
            if (h >= w.start_hour && h < w.end_hour) peak = true;
        out.prices[k] = peak ? peak_price : offpeak_price;
    }
    return out;
}

HistoryDatabase synthetic_weather(std::uint64_t seed, std::size_t days, const ClearSkyParams& p,
                                  double dropout) {
    if (!(dropout >= 0 && dropout <= 1)) throw ConfigError("dropout probability must lie in [0,1]");
    if (!(p.dt_hours > 0) || std::abs(24.0 / p.dt_hours - std::round(24.0 / p.dt_hours)) > 1e-9)
        throw ConfigError("synthetic step must divide 24 h");
    if (!(p.sunrise_hour < p.sunset_hour)) throw ConfigError("sunrise must precede sunset");

    Rng rng(seed);
    HistoryDatabase db;
    db.dt_hours = p.dt_hours;
    db.location = "synthetic";
    const std::size_t per_day = db.steps_per_day();
    for (std::size_t d = 0; d < days; ++d) {
        const Date day{std::chrono::sys_days{p.start_date} + std::chrono::days{static_cast<int>(d)}};
        double prob = dropout;
        if (p.dropout_spread > 0)
            prob = std::clamp(dropout + p.dropout_spread * (2.0 * rng.uniform01() - 1.0), 0.0, 1.0);
        WeatherTrajectory traj;
        traj.start_timestamp = midnight(day);
        traj.dt_hours = p.dt_hours;
        traj.samples.resize(per_day);
        for (std::size_t k = 0; k < per_day; ++k) {
            const double h = p.dt_hours * static_cast<double>(k);
            double dni = 0.0;
            if (h > p.sunrise_hour && h < p.sunset_hour)
                dni = p.peak_dni * std::sin(M_PI * (h - p.sunrise_hour) / (p.sunset_hour - p.sunrise_hour));
            // Draw for every step so the stream does not depend on daylight hours.
            const bool cloud = prob > 0 && rng.bernoulli(prob);
            if (cloud) dni = 0.0;
            // 0.1 W/m^2 resolution keeps the CSV text round-trip exact.
            traj.samples[k] = WeatherSample{std::round(dni * 1e4) / 1e4, p.t_amb, p.wind};
        }
        db.days.emplace(day, std::move(traj));
    }
    return db;
}

HistoryDatabase synthetic_month_history(std::uint64_t seed, int first_year, int last_year,
                                        unsigned month, ClearSkyParams params, double dropout) {
    if (first_year > last_year) throw ConfigError("synthetic year range is empty");
    if (month < 1 || month > 12) throw ConfigError("month must lie in 1..12");
    HistoryDatabase db;
    db.dt_hours = params.dt_hours;
    db.location = "synthetic";
    for (int y = first_year; y <= last_year; ++y) {
        const std::chrono::year_month ym{std::chrono::year{y}, std::chrono::month{month}};
        const auto last = std::chrono::year_month_day_last{ym / std::chrono::last};
        params.start_date = Date{ym / std::chrono::day{1}};
        const auto days = static_cast<std::size_t>(static_cast<unsigned>(last.day())) + 1;
        const std::uint64_t year_seed = seed * 1000003ULL + static_cast<std::uint64_t>(y);
        auto part = synthetic_weather(year_seed, days, params, dropout);
        db.days.merge(part.days);
    }
    return db;
}

}  // namespace cst
