#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace cst {

// Naive local-standard-time instants. No zone or DST handling by design:
// a day is always 24 h long.
using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::year_month_day;

// Accepts "YYYY-MM-DDTHH:MM[:SS]" (a space may replace the 'T').
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);
std::string format_date(Date d);
std::optional<Date> parse_date(std::string_view text);

Date date_of(Timestamp t);
Timestamp midnight(Date d);
unsigned month_of(Timestamp t);
// Hours since local midnight, fractional.
double hour_of_day(Timestamp t);
Timestamp add_hours(Timestamp t, double hours);

}  // namespace cst
