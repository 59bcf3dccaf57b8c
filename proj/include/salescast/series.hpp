#pragma once

#include "salescast/date.hpp"

#include <cmath>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace salescast {

/// Marker for closed/removed days inside a calendar-complete series.
inline constexpr double kGap = std::numeric_limits<double>::quiet_NaN();

inline bool is_gap_value(double v) { return std::isnan(v); }

/**
 * Calendar-indexed daily net sales for one entity.
 *
 * Values cover every calendar day from `start` onwards; closed or removed
 * days carry a NaN gap marker. Gap days are skipped by fitting and metrics
 * and omitted from CSV output.
 */
struct DailySeries {
    std::string entity_id;
    Date start{};
    std::vector<double> values;
    bool log_space = false;
    bool normalized = false;
    double log_eps = 0.0; // offset applied before the log2 transform

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    Date date_at(std::size_t i) const { return start + static_cast<int>(i); }
    Date end_date() const { return start + static_cast<int>(values.size()) - 1; }
    DateRange span() const { return {start, end_date()}; }

    bool is_gap(std::size_t i) const { return is_gap_value(values[i]); }
    bool in_range(Date d) const { return !empty() && d >= start && d <= end_date(); }

    /// Value on a date; nullopt outside the range or on a gap day.
    std::optional<double> at(Date d) const {
        if (!in_range(d)) return std::nullopt;
        const double v = values[static_cast<std::size_t>(d - start)];
        if (is_gap_value(v)) return std::nullopt;
        return v;
    }

    std::size_t n_observed() const;

    /// Observation dates (non-gap), in calendar order.
    std::vector<Date> observed_dates() const;

    /// Sub-series on [from, to]; throws DataError when outside the range.
    DailySeries slice(Date from, Date to) const;

    /// First/last non-gap date; throws DataError when fully empty.
    Date first_observed() const;
    Date last_observed() const;
};

/// Per-date forecast in observation and log2 space; NaN marks unavailable days.
struct Forecast {
    std::vector<Date> dates;
    std::vector<double> yhat;
    std::vector<double> yhat_log;

    std::size_t size() const { return dates.size(); }

    std::optional<double> at(Date d) const;
};

std::vector<Date> date_range_days(const DateRange& range);

// Daily-series CSV: header `date,value`, ISO dates, gap days omitted.
DailySeries read_series_csv(std::istream& in, std::string entity_id);
DailySeries load_series_csv(const std::string& path, std::string entity_id = "");
void write_series_csv(const DailySeries& series, std::ostream& out);

// Forecast CSV: header `date,yhat,yhat_log`; unavailable days omitted.
void write_forecast_csv(const Forecast& forecast, std::ostream& out);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

} // namespace salescast
