#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ssdopt {

/// Calendar date at day resolution. Arithmetic is in calendar days.
using Date = std::chrono::sys_days;

inline Date make_date(int y, unsigned m, unsigned d) {
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) {
        throw std::invalid_argument("invalid calendar date " + std::to_string(y) + "-" +
                                    std::to_string(m) + "-" + std::to_string(d));
    }
    return Date{ymd};
}

/// Parses YYYY-MM-DD.
inline Date parse_date(std::string_view s) {
    auto field = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        const char* first = s.data() + pos;
        auto [ptr, ec] = std::from_chars(first, first + len, v);
        if (ec != std::errc{} || ptr != first + len) {
            throw std::invalid_argument("malformed date '" + std::string(s) + "'");
        }
        return v;
    };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        throw std::invalid_argument("malformed date '" + std::string(s) + "'");
    }
    return make_date(field(0, 4), static_cast<unsigned>(field(5, 2)),
                     static_cast<unsigned>(field(8, 2)));
}

inline std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

/// Signed calendar-day distance `to - from`.
inline long days_between(Date from, Date to) { return (to - from).count(); }

inline int year_of(Date d) { return static_cast<int>(std::chrono::year_month_day{d}.year()); }
inline unsigned month_of(Date d) {
    return static_cast<unsigned>(std::chrono::year_month_day{d}.month());
}

}  // namespace ssdopt
