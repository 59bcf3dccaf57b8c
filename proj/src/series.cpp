#include "salescast/series.hpp"

#include "salescast/errors.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace salescast {

std::size_t DailySeries::n_observed() const {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [](double v) { return !is_gap_value(v); }));
}

std::vector<Date> DailySeries::observed_dates() const {
    std::vector<Date> dates;
    dates.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!is_gap(i)) dates.push_back(date_at(i));
    }
    return dates;
}

DailySeries DailySeries::slice(Date from, Date to) const {
    if (empty() || from < start || to > end_date() || to < from) {
        throw DataError("slice [" + from.to_string() + ", " + to.to_string() +
                        "] outside series range of " + entity_id);
    }
    DailySeries out;
    out.entity_id = entity_id;
    out.start = from;
    out.log_space = log_space;
    out.normalized = normalized;
    out.log_eps = log_eps;
    const auto offset = static_cast<std::size_t>(from - start);
    out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(offset),
                      values.begin() + static_cast<std::ptrdiff_t>(offset + static_cast<std::size_t>(to - from) + 1));
    return out;
}

Date DailySeries::first_observed() const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!is_gap(i)) return date_at(i);
    }
    throw DataError("series " + entity_id + " has no observations");
}

Date DailySeries::last_observed() const {
    for (std::size_t i = values.size(); i-- > 0;) {
        if (!is_gap(i)) return date_at(i);
    }
    throw DataError("series " + entity_id + " has no observations");
}

std::optional<double> Forecast::at(Date d) const {
    for (std::size_t i = 0; i < dates.size(); ++i) {
        if (dates[i] == d) {
            if (is_gap_value(yhat[i])) return std::nullopt;
            return yhat[i];
        }
    }
    return std::nullopt;
}

std::vector<Date> date_range_days(const DateRange& range) {
    std::vector<Date> out;
    out.reserve(static_cast<std::size_t>(std::max(range.n_days(), 0)));
    for (Date d = range.start; d <= range.end; ++d) out.push_back(d);
    return out;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

namespace {

bool parse_double(std::string_view s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

} // namespace

DailySeries read_series_csv(std::istream& in, std::string entity_id) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "date,value") {
        throw FormatError("daily-series CSV must start with header `date,value`");
    }
    std::vector<std::pair<Date, double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view sv = trim(line);
        if (sv.empty()) continue;
        const auto comma = sv.find(',');
        if (comma == std::string_view::npos) {
            throw FormatError("line " + std::to_string(line_no) + ": expected `date,value`");
        }
        const auto date = Date::parse(trim(sv.substr(0, comma)));
        double value = 0.0;
        if (!date || !parse_double(trim(sv.substr(comma + 1)), value)) {
            throw FormatError("line " + std::to_string(line_no) + ": malformed row `" + line + "`");
        }
        if (!rows.empty() && date <= rows.back().first) {
            throw FormatError("line " + std::to_string(line_no) + ": dates must be strictly increasing");
        }
        rows.emplace_back(*date, value);
    }
    DailySeries series;
    series.entity_id = std::move(entity_id);
    if (rows.empty()) return series;
    series.start = rows.front().first;
    series.values.assign(static_cast<std::size_t>(rows.back().first - rows.front().first) + 1, kGap);
    for (const auto& [d, v] : rows) {
        series.values[static_cast<std::size_t>(d - series.start)] = v;
    }
    return series;
}

DailySeries load_series_csv(const std::string& path, std::string entity_id) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open series file " + path);
    if (entity_id.empty()) entity_id = std::filesystem::path(path).stem().string();
    return read_series_csv(in, std::move(entity_id));
}

void write_series_csv(const DailySeries& series, std::ostream& out) {
    out << "date,value\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.is_gap(i)) continue;
        out << series.date_at(i).to_string() << ',' << format_double(series.values[i]) << '\n';
    }
}

void write_forecast_csv(const Forecast& forecast, std::ostream& out) {
    out << "date,yhat,yhat_log\n";
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        if (is_gap_value(forecast.yhat[i])) continue;
        out << forecast.dates[i].to_string() << ',' << format_double(forecast.yhat[i]) << ','
            << format_double(forecast.yhat_log[i]) << '\n';
    }
}

} // namespace salescast
