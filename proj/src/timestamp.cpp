#include "lobviz/timestamp.hpp"

#include "lobviz/error.hpp"

#include <cstdio>

namespace lobviz {

namespace {

bool all_digits(std::string_view s) {
    for (char c : s) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    return true;
}

int digits(std::string_view s, std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

Timestamp from_fields(int year, int month, int day, int hour, int minute, int second, int milli,
                      std::string_view original) {
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) {
        throw ParseError("invalid calendar date in timestamp '" + std::string(original) + "'", 0);
    }
    if (hour > 23 || minute > 59 || second > 59 || milli > 999) {
        throw ParseError("invalid time of day in timestamp '" + std::string(original) + "'", 0);
    }
    const auto days = sys_days{ymd}.time_since_epoch().count();
    const std::int64_t ms = static_cast<std::int64_t>(days) * kMillisPerDay +
                            ((hour * 60LL + minute) * 60LL + second) * 1000LL + milli;
    return Timestamp{ms};
}

}  // namespace

Timestamp parse_timestamp(std::string_view value) {
    if (value.size() != 17) {
        throw ParseError("timestamp must have 17 digits (YYYYMMDDHHMMSSmmm), got '" +
                             std::string(value) + "'",
                         0);
    }
    if (!all_digits(value)) {
        throw ParseError("timestamp contains a non-digit: '" + std::string(value) + "'", 0);
    }
    return from_fields(digits(value, 0, 4), digits(value, 4, 2), digits(value, 6, 2),
                       digits(value, 8, 2), digits(value, 10, 2), digits(value, 12, 2),
                       digits(value, 14, 3), value);
}

Timestamp parse_iso8601(std::string_view value) {
    if (value.size() == 17 && all_digits(value)) {
        return parse_timestamp(value);
    }
    auto bad = [&]() {
        return ParseError("expected ISO-8601 timestamp YYYY-MM-DDTHH:MM:SS[.mmm], got '" +
                              std::string(value) + "'",
                          0);
    };
    if (!value.empty() && value.back() == 'Z') {
        value.remove_suffix(1);
    }
    if (value.size() < 10 || value[4] != '-' || value[7] != '-') {
        throw bad();
    }
    const auto date = value.substr(0, 10);
    if (!all_digits(date.substr(0, 4)) || !all_digits(date.substr(5, 2)) || !all_digits(date.substr(8, 2))) {
        throw bad();
    }
    int hour = 0, minute = 0, second = 0, milli = 0;
    if (value.size() > 10) {
        if ((value[10] != 'T' && value[10] != ' ') || value.size() < 19 || value[13] != ':' ||
            value[16] != ':') {
            throw bad();
        }
        const auto hh = value.substr(11, 2), mm = value.substr(14, 2), ss = value.substr(17, 2);
        if (!all_digits(hh) || !all_digits(mm) || !all_digits(ss)) {
            throw bad();
        }
        hour = digits(hh, 0, 2);
        minute = digits(mm, 0, 2);
        second = digits(ss, 0, 2);
        if (value.size() > 19) {
            if (value[19] != '.' || value.size() != 23 || !all_digits(value.substr(20, 3))) {
                throw bad();
            }
            milli = digits(value, 20, 3);
        }
    }
    return from_fields(digits(date, 0, 4), digits(date, 5, 2), digits(date, 8, 2), hour, minute,
                       second, milli, value);
}

Date date_of_day(std::int64_t day) {
    return Date{std::chrono::sys_days{std::chrono::days{day}}};
}

std::int64_t day_of_date(Date d) {
    return std::chrono::sys_days{d}.time_since_epoch().count();
}

bool is_weekday(std::int64_t day) {
    const std::chrono::weekday wd{std::chrono::sys_days{std::chrono::days{day}}};
    return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
}

std::string format_iso8601(Timestamp t) {
    const auto day = day_index(t);
    const auto ymd = date_of_day(day);
    const std::int64_t in_day = t.ms - day * kMillisPerDay;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(in_day / 3'600'000), static_cast<int>(in_day / 60'000 % 60),
                  static_cast<int>(in_day / 1000 % 60), static_cast<int>(in_day % 1000));
    return buf;
}

std::string format_sending_time(Timestamp t) {
    const auto day = day_index(t);
    const auto ymd = date_of_day(day);
    const std::int64_t in_day = t.ms - day * kMillisPerDay;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d%02u%02u%02d%02d%02d%03d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(in_day / 3'600'000), static_cast<int>(in_day / 60'000 % 60),
                  static_cast<int>(in_day / 1000 % 60), static_cast<int>(in_day % 1000));
    return buf;
}

Date parse_date(std::string_view value) {
    if (value.size() == 8 && all_digits(value)) {
        const Date d{std::chrono::year{digits(value, 0, 4)},
                     std::chrono::month{static_cast<unsigned>(digits(value, 4, 2))},
                     std::chrono::day{static_cast<unsigned>(digits(value, 6, 2))}};
        if (!d.ok()) {
            throw ParseError("invalid date '" + std::string(value) + "'", 0);
        }
        return d;
    }
    if (value.size() != 10) {
        throw ParseError("expected date YYYY-MM-DD, got '" + std::string(value) + "'", 0);
    }
    return date_of_day(day_index(parse_iso8601(value)));
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

}  // namespace lobviz
