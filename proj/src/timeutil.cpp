#include "cst/timeutil.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace cst {
namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc{};
}

}  // namespace

std::optional<Date> parse_date(std::string_view s) {
    int y, m, d;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, m) || !read_int(s, 8, 2, d)) return std::nullopt;
    Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
              std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
    if (s.size() < 16) return std::nullopt;
    auto date = parse_date(s.substr(0, 10));
    if (!date) return std::nullopt;
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    int hh, mm, ss = 0;
    if (!read_int(s, 11, 2, hh) || s[13] != ':' || !read_int(s, 14, 2, mm)) return std::nullopt;
    std::size_t rest = 16;
    if (s.size() >= 19 && s[16] == ':') {
        if (!read_int(s, 17, 2, ss)) return std::nullopt;
        rest = 19;
    }
    if (rest != s.size()) return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    return midnight(*date) + std::chrono::hours{hh} + std::chrono::minutes{mm} +
           std::chrono::seconds{ss};
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

std::string format_timestamp(Timestamp t) {
    const Date d = date_of(t);
    const auto secs = (t - midnight(d)).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02lld:%02lld:%02lld", format_date(d).c_str(),
                  static_cast<long long>(secs / 3600), static_cast<long long>((secs / 60) % 60),
                  static_cast<long long>(secs % 60));
    return buf;
}

Date date_of(Timestamp t) { return Date{std::chrono::floor<std::chrono::days>(t)}; }

Timestamp midnight(Date d) { return std::chrono::sys_days{d}; }

unsigned month_of(Timestamp t) { return static_cast<unsigned>(date_of(t).month()); }

double hour_of_day(Timestamp t) {
    return static_cast<double>((t - midnight(date_of(t))).count()) / 3600.0;
}

Timestamp add_hours(Timestamp t, double hours) {
    return t + std::chrono::seconds{static_cast<long long>(std::llround(hours * 3600.0))};
}

}  // namespace cst
