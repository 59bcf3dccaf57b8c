#include "salescast/pipeline.hpp"

#include "salescast/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>

namespace salescast {

void CleaningConfig::validate() const {
    if (cutoff_hour < 0 || cutoff_hour >= 12) {
        throw ConfigError("cutoff_hour must be in [0, 12), got " + std::to_string(cutoff_hour));
    }
    if (eps_log < 0.0) throw ConfigError("eps_log must be >= 0");
    if (validity_window && validity_window->end < validity_window->start) {
        throw ConfigError("validity_window end precedes start");
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Minimal RFC-4180 field splitting; quoted fields may contain commas.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

bool parse_double_field(std::string_view s, double& out) {
    s = trim(s);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_ll_field(std::string_view s, long long& out) {
    s = trim(s);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_bool_field(std::string_view s, bool& out) {
    s = trim(s);
    if (s == "true" || s == "1") { out = true; return true; }
    if (s == "false" || s == "0") { out = false; return true; }
    return false;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == name) return i;
    }
    throw FormatError("transaction CSV header lacks column `" + name + "`");
}

} // namespace

ParsedTransactions parse_transactions(std::istream& in, const CsvSchema& schema) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("transaction CSV has no header row");
    const auto header = split_csv_line(line);
    const std::size_t c_ts = column_index(header, schema.timestamp);
    const std::size_t c_item = column_index(header, schema.item_text);
    const std::size_t c_price = column_index(header, schema.unit_price);
    const std::size_t c_qty = column_index(header, schema.quantity);
    const std::size_t c_tip = column_index(header, schema.is_tip);
    const std::size_t n_columns = header.size();

    ParsedTransactions out;
    std::size_t line_no = 1;
    std::size_t n_rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++n_rows;
        const auto fields = split_csv_line(line);
        auto reject = [&](const std::string& reason) {
            out.malformed.push_back({line_no, line, reason});
        };
        if (fields.size() != n_columns) {
            reject("expected " + std::to_string(n_columns) + " fields, got " +
                   std::to_string(fields.size()));
            continue;
        }
        TransactionRecord rec;
        const auto ts = DateTime::parse(trim(fields[c_ts]));
        if (!ts) { reject("unparseable timestamp `" + fields[c_ts] + "`"); continue; }
        rec.timestamp = *ts;
        rec.item_text = fields[c_item];
        if (!parse_double_field(fields[c_price], rec.unit_price)) {
            reject("unparseable unit_price `" + fields[c_price] + "`");
            continue;
        }
        if (!parse_ll_field(fields[c_qty], rec.quantity)) {
            reject("unparseable quantity `" + fields[c_qty] + "`");
            continue;
        }
        if (rec.quantity == 0) { reject("quantity must be nonzero"); continue; }
        if (!parse_bool_field(fields[c_tip], rec.is_tip)) {
            reject("unparseable is_tip `" + fields[c_tip] + "`");
            continue;
        }
        out.records.push_back(std::move(rec));
    }

    if (n_rows > 0 && out.malformed.size() * 10 > n_rows) {
        std::ostringstream msg;
        msg << out.malformed.size() << " of " << n_rows << " rows malformed (>10%); first offenders:";
        const std::size_t shown = std::min<std::size_t>(5, out.malformed.size());
        for (std::size_t i = 0; i < shown; ++i) {
            msg << "\n  line " << out.malformed[i].line_no << ": " << out.malformed[i].reason;
        }
        throw CorruptInputError(msg.str());
    }
    return out;
}

std::pair<std::vector<TransactionRecord>, CleaningReport>
clean_transactions(std::vector<TransactionRecord> records, const CleaningConfig& cfg) {
    cfg.validate();
    CleaningReport report;
    report.n_input = records.size();
    std::vector<TransactionRecord> kept;
    kept.reserve(records.size());
    for (auto& rec : records) {
        if (cfg.validity_window && !cfg.validity_window->contains(rec.timestamp.date)) {
            ++report.n_dropped_noise;
            continue;
        }
        if (cfg.drop_tips && rec.is_tip) {
            ++report.n_dropped_tips;
            continue;
        }
        kept.push_back(std::move(rec));
    }
    report.n_retained = kept.size();
    report.fraction_dropped =
        report.n_input == 0
            ? 0.0
            : static_cast<double>(report.n_input - report.n_retained) / static_cast<double>(report.n_input);
    return {std::move(kept), report};
}

DailySeries aggregate_daily(std::span<const TransactionRecord> records, const CleaningConfig& cfg,
                            CleaningReport* report, std::string entity_id) {
    cfg.validate();
    if (records.empty()) throw DataError("cannot aggregate an empty record set");

    // Per-day contributions are sorted before summing so the totals are
    // bit-identical under any permutation of the input records.
    std::map<Date, std::vector<double>> contributions;
    for (const auto& rec : records) {
        // After-midnight sales belong to the previous business day.
        Date business_day = rec.timestamp.date;
        if (rec.timestamp.hour() < cfg.cutoff_hour) business_day = business_day - 1;
        contributions[business_day].push_back(rec.unit_price * static_cast<double>(rec.quantity));
    }
    std::map<Date, double> totals;
    for (auto& [day, amounts] : contributions) {
        std::sort(amounts.begin(), amounts.end());
        double sum = 0.0;
        for (double a : amounts) sum += a;
        totals.emplace(day, sum);
    }

    DailySeries series;
    series.entity_id = std::move(entity_id);
    series.start = totals.begin()->first;
    const Date last = totals.rbegin()->first;
    series.values.assign(static_cast<std::size_t>(last - series.start) + 1, kGap);
    for (const auto& [day, total] : totals) {
        const auto i = static_cast<std::size_t>(day - series.start);
        if (total < 0.0 && cfg.drop_negative_days) {
            if (report) ++report->n_negative_days_removed;
            continue;
        }
        if (total == 0.0 && cfg.eps_log == 0.0) {
            continue; // recorded zero-sales day: treated as closed
        }
        series.values[i] = total;
    }
    return series;
}

DailySeries zeros_to_gaps(DailySeries series) {
    for (auto& v : series.values) {
        if (v == 0.0) v = kGap;
    }
    return series;
}

DailySeries log2_transform(const DailySeries& series, double eps_log) {
    if (series.log_space) throw DataError("series " + series.entity_id + " is already in log space");
    DailySeries out = series;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (out.is_gap(i)) continue;
        const double shifted = out.values[i] + eps_log;
        if (shifted <= 0.0) {
            throw DomainError("log2 transform undefined for value " + format_double(out.values[i]) +
                              " on " + out.date_at(i).to_string());
        }
        out.values[i] = std::log2(shifted);
    }
    out.log_space = true;
    out.log_eps = eps_log;
    return out;
}

DailySeries exp2_inverse(const DailySeries& series) {
    if (!series.log_space) throw DataError("series " + series.entity_id + " is not in log space");
    DailySeries out = series;
    for (auto& v : out.values) {
        if (!is_gap_value(v)) v = std::exp2(v) - series.log_eps;
    }
    out.log_space = false;
    out.log_eps = 0.0;
    return out;
}

std::pair<DailySeries, double> normalize(const DailySeries& series) {
    if (series.log_space) throw DataError("normalize expects an observation-space series");
    if (series.normalized) throw DataError("series " + series.entity_id + " is already normalized");
    double scale = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series.is_gap(i)) scale = std::max(scale, series.values[i]);
    }
    if (scale <= 0.0) {
        throw DataError("degenerate scale: series " + series.entity_id + " has no positive values");
    }
    DailySeries out = series;
    for (auto& v : out.values) {
        if (!is_gap_value(v)) v /= scale;
    }
    out.normalized = true;
    return {std::move(out), scale};
}

} // namespace salescast
