#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace salescast {

/// Calendar date stored as days since 1970-01-01, proleptic Gregorian.
class Date {
public:
    Date() = default;

    static Date from_ymd(int year, int month, int day);
    static Date from_serial(std::int32_t days) { return Date(days); }

    /// Parses "YYYY-MM-DD". Returns nullopt on anything else.
    static std::optional<Date> parse(std::string_view iso);

    std::int32_t serial() const { return serial_; }
    int year() const;
    int month() const;
    int day() const;

    /// 0 = Monday ... 6 = Sunday.
    int weekday() const;

    /// 1-based ordinal day within the year.
    int day_of_year() const;

    std::string to_string() const;

    Date operator+(int days) const { return Date(serial_ + days); }
    Date operator-(int days) const { return Date(serial_ - days); }
    int operator-(Date other) const { return serial_ - other.serial_; }
    Date& operator++() { ++serial_; return *this; }

    auto operator<=>(const Date&) const = default;

private:
    explicit Date(std::int32_t serial) : serial_(serial) {}
    std::int32_t serial_ = 0;
};

/// Calendar instant with second resolution.
struct DateTime {
    Date date;
    int second_of_day = 0;

    int hour() const { return second_of_day / 3600; }

    /// Parses "YYYY-MM-DD[T ]HH:MM[:SS]". Returns nullopt on anything else.
    static std::optional<DateTime> parse(std::string_view iso);
};

/// Inclusive date interval.
struct DateRange {
    Date start;
    Date end;

    int n_days() const { return end - start + 1; }
    bool contains(Date d) const { return start <= d && d <= end; }
    auto operator<=>(const DateRange&) const = default;
};

bool is_leap_year(int year);
int days_in_month(int year, int month);

/// First/last day of a calendar month.
Date month_start(int year, int month);
Date month_end(int year, int month);

/// Whole months between two dates, counting the month of `end` (Table-style durations).
int span_months(Date start, Date end);

} // namespace salescast
