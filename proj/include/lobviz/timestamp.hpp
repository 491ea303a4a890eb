#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace lobviz {

/// Wall-clock instant at millisecond precision, counted from 1970-01-01 in the
/// exchange's local clock. No timezone conversion is ever applied.
struct Timestamp {
    std::int64_t ms = 0;

    friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
};

inline constexpr std::int64_t kMillisPerSecond = 1000;
inline constexpr std::int64_t kMillisPerDay = 86'400'000;

using Date = std::chrono::year_month_day;

/// Parses the 17-digit `YYYYMMDDHHMMSSmmm` sending-time form.
Timestamp parse_timestamp(std::string_view value);

/// Parses `YYYY-MM-DDTHH:MM:SS[.mmm][Z]`, `YYYY-MM-DD` or the 17-digit form.
Timestamp parse_iso8601(std::string_view value);

/// `YYYY-MM-DDTHH:MM:SS.mmm`
std::string format_iso8601(Timestamp t);

/// `YYYYMMDDHHMMSSmmm`
std::string format_sending_time(Timestamp t);

Date parse_date(std::string_view value);
std::string format_date(Date d);

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

constexpr std::int64_t day_index(Timestamp t) { return floor_div(t.ms, kMillisPerDay); }
constexpr std::int64_t second_index(Timestamp t) { return floor_div(t.ms, kMillisPerSecond); }

Date date_of_day(std::int64_t day);
std::int64_t day_of_date(Date d);

/// Monday..Friday.
bool is_weekday(std::int64_t day);

}  // namespace lobviz
