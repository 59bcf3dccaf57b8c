#include "salescast/date.hpp"

#include "salescast/errors.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace salescast {

namespace {

// Civil <-> serial conversions after Howard Hinnant's chrono-compatible algorithms.
std::int32_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int>(doe) - 719468;
}

struct Civil {
    int year;
    int month;
    int day;
};

Civil civil_from_days(std::int32_t z) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), static_cast<int>(m), static_cast<int>(d)};
}

bool parse_int(std::string_view s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

} // namespace

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) return 29;
    return lengths[static_cast<std::size_t>(month - 1)];
}

Date Date::from_ymd(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) {
        throw DomainError("invalid calendar date " + std::to_string(year) + "-" +
                          std::to_string(month) + "-" + std::to_string(day));
    }
    return Date(days_from_civil(year, month, day));
}

std::optional<Date> Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_int(iso.substr(0, 4), y) || !parse_int(iso.substr(5, 2), m) ||
        !parse_int(iso.substr(8, 2), d)) {
        return std::nullopt;
    }
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return std::nullopt;
    return Date(days_from_civil(y, m, d));
}

int Date::year() const { return civil_from_days(serial_).year; }
int Date::month() const { return civil_from_days(serial_).month; }
int Date::day() const { return civil_from_days(serial_).day; }

int Date::weekday() const {
    // 1970-01-01 was a Thursday (Monday = 0 -> 3).
    return static_cast<int>(((serial_ % 7) + 7 + 3) % 7);
}

int Date::day_of_year() const {
    const Civil c = civil_from_days(serial_);
    return serial_ - days_from_civil(c.year, 1, 1) + 1;
}

std::string Date::to_string() const {
    const Civil c = civil_from_days(serial_);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", c.year, c.month, c.day);
    return buf;
}

std::optional<DateTime> DateTime::parse(std::string_view iso) {
    if (iso.size() < 16) return std::nullopt;
    const auto date = Date::parse(iso.substr(0, 10));
    if (!date || (iso[10] != 'T' && iso[10] != ' ')) return std::nullopt;
    std::string_view clock = iso.substr(11);
    if (clock.size() != 5 && clock.size() != 8) return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (clock[2] != ':' || !parse_int(clock.substr(0, 2), hh) ||
        !parse_int(clock.substr(3, 2), mm)) {
        return std::nullopt;
    }
    if (clock.size() == 8) {
        if (clock[5] != ':' || !parse_int(clock.substr(6, 2), ss)) return std::nullopt;
    }
    if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 59) return std::nullopt;
    return DateTime{*date, hh * 3600 + mm * 60 + ss};
}

Date month_start(int year, int month) { return Date::from_ymd(year, month, 1); }

Date month_end(int year, int month) {
    return Date::from_ymd(year, month, days_in_month(year, month));
}

int span_months(Date start, Date end) {
    return (end.year() - start.year()) * 12 + (end.month() - start.month()) + 1;
}

} // namespace salescast
