#pragma once

#include "salescast/date.hpp"
#include "salescast/series.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace salescast {

/// One raw point-of-sale line item. quantity is never zero; unit_price may
/// be negative for retrospective corrections.
struct TransactionRecord {
    DateTime timestamp;
    std::string item_text;
    double unit_price = 0.0;
    long long quantity = 0;
    bool is_tip = false;
};

/// Column-name mapping for the transaction CSV; headers are matched by name.
struct CsvSchema {
    std::string timestamp = "timestamp";
    std::string item_text = "item_text";
    std::string unit_price = "unit_price";
    std::string quantity = "quantity";
    std::string is_tip = "is_tip";
};

struct MalformedRow {
    std::size_t line_no = 0;
    std::string content;
    std::string reason;
};

struct ParsedTransactions {
    std::vector<TransactionRecord> records;
    std::vector<MalformedRow> malformed;
};

/**
 * Cleaning and aggregation rules.
 *
 * Transactions before cutoff_hour belong to the previous business day.
 * With eps_log == 0 a zero-sales day is treated as a closed day (gap);
 * eps_log > 0 keeps zeros and offsets every value before the log2 transform.
 */
struct CleaningConfig {
    int cutoff_hour = 6; // 0 <= cutoff_hour < 12
    bool drop_tips = true;
    bool drop_negative_days = true;
    double eps_log = 0.0;
    std::optional<DateRange> validity_window;

    void validate() const;
};

/// Tally of everything the cleaning stage removed. The record-level drops
/// partition the input: n_input = n_retained + n_dropped_noise + n_dropped_tips.
/// n_negative_days_removed counts days, not records.
struct CleaningReport {
    std::size_t n_input = 0;
    std::size_t n_retained = 0;
    std::size_t n_dropped_noise = 0;
    std::size_t n_dropped_tips = 0;
    std::size_t n_negative_days_removed = 0;
    double fraction_dropped = 0.0;
};

/**
 * Parses the transaction CSV. Malformed rows are collected, not dropped
 * silently; more than 10% malformed raises CorruptInputError listing the
 * first five offenders. An unreadable header raises FormatError.
 */
ParsedTransactions parse_transactions(std::istream& in, const CsvSchema& schema = {});

/// Removes tips and out-of-window noise; total (never throws).
std::pair<std::vector<TransactionRecord>, CleaningReport>
clean_transactions(std::vector<TransactionRecord> records, const CleaningConfig& cfg);

/**
 * Aggregates cleaned records to a calendar-complete daily net-sales series.
 * Days with negative totals become gaps when drop_negative_days is set and
 * are counted into `report` when given. Throws DataError on an empty input.
 */
DailySeries aggregate_daily(std::span<const TransactionRecord> records, const CleaningConfig& cfg,
                            CleaningReport* report = nullptr, std::string entity_id = {});

/// Replaces exact zero values with gap markers (closed days).
DailySeries zeros_to_gaps(DailySeries series);

/// values <- log2(value + eps_log). Requires value + eps_log > 0 on every
/// observed day; violations raise DomainError naming the offending date.
DailySeries log2_transform(const DailySeries& series, double eps_log = 0.0);

/// Exact inverse of log2_transform, including the eps_log offset.
DailySeries exp2_inverse(const DailySeries& series);

/// Divides by the series maximum so the result peaks at 1. Returns the scale.
std::pair<DailySeries, double> normalize(const DailySeries& series);

} // namespace salescast
