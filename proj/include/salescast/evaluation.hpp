#pragma once

#include "salescast/fitting.hpp"
#include "salescast/scenario.hpp"
#include "salescast/series.hpp"
#include "salescast/transfer.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace salescast {

struct MapeResult {
    double percent = 0.0;
    std::size_t n_excluded = 0; // common days skipped: actual gap, y <= 0, or no forecast
    std::size_t n_included = 0;
};

/// 100/n * sum |y - yhat| / y over common non-gap days with positive actuals.
MapeResult mape(const DailySeries& actual, const Forecast& forecast);

/// Root mean squared error over common days (no positivity exclusion).
double rmse(const DailySeries& actual, const Forecast& forecast);

/**
 * Seasonal naive baseline: each test day is predicted by the actual from
 * the same month/day one year earlier (Feb 29 sources from Feb 28). When the
 * source day is a gap, the unique day within +-3 days of it sharing the test
 * day's weekday is used; failing that, the nearest present day within +-3
 * days. Days with no resolvable source are marked unavailable.
 */
Forecast seasonal_naive(const DailySeries& history, const DateRange& test_window);

struct MonthlyMape {
    std::vector<double> monthly; // one per calendar month in the window, NaN = no valid days
    double mean = 0.0;           // arithmetic mean over months with data
    double pooled = 0.0;         // single MAPE over all days, for comparison
    std::size_t n_excluded = 0;
    int n_months_with_data = 0;
};

/// Per-calendar-month MAPE averaged with equal month weights. The window
/// must span whole calendar months.
MonthlyMape monthly_average_mape(const DailySeries& actual, const Forecast& forecast,
                                 const DateRange& window);

/// 100 * (perf1 / perf2 - 1); perf2 must be positive.
double percentage_change(double perf1, double perf2);

/// Source-by-target grid of MAPE results; the diagonal stays undefined.
struct TransferMatrix {
    std::vector<std::string> sources;
    std::vector<std::string> targets;
    std::vector<std::vector<double>> cells; // cells[target][source], NaN = undefined

    double cell(std::size_t target, std::size_t source) const { return cells[target][source]; }
};

/// Row/column statistics over defined cells (sample standard deviation,
/// matching the published tables) plus the per-target best source.
struct MatrixSummary {
    std::vector<double> row_avg, row_sd; // per target
    std::vector<double> col_avg, col_sd; // per source
    std::vector<std::size_t> best_per_target; // argmin source index, ties -> lowest index
};

MatrixSummary transfer_matrix_summary(const TransferMatrix& matrix);

struct EvaluationReport {
    std::string entity_id;
    std::string scenario;
    bool feasible = true;
    std::string message; // failure reason when infeasible

    std::vector<double> mape_monthly;
    double mape_mean = kGap;
    double mape_pooled = kGap;
    double rmse_value = kGap;
    std::size_t n_excluded_days = 0;
    double baseline_mape = kGap;
    std::string best_source; // transfer scenarios only
    std::map<std::string, double> comparisons; // e.g. {"baseline": -54.72}

    DateRange train_window{};
    DateRange test_window{};
    std::optional<DateRange> adapt_window;
};

struct ScenarioResult {
    ScenarioConfig config;
    std::map<std::string, EvaluationReport> reports; // keyed by (target) entity
    std::optional<TransferMatrix> matrix;            // scenarios 2 and 3
    std::optional<MatrixSummary> matrix_summary;
    std::map<std::string, AdditiveModel> models; // per entity; best-case model for transfers
};

/**
 * Runs one scenario over all entities. Isolated scenarios fit each entity
 * on its own window; transfer scenarios evaluate every ordered
 * (source, target) pair into the matrix and report each target's best case.
 * Entities with insufficient coverage get infeasible report entries; the
 * run continues for the rest.
 */
ScenarioResult run_scenario(const std::map<std::string, DailySeries>& entities,
                            const ScenarioConfig& scenario, const FitConfig& fit_cfg = {},
                            const AdaptConfig& adapt_cfg = {});

/// Report JSON for a whole run (per-entity reports plus matrix summary).
void write_report_json(const ScenarioResult& result, std::ostream& out);

/// Matrix CSV: first column target, then one column per source, trailing
/// AVG/SD/BEST columns, and AVG/SD rows for the source columns.
void write_matrix_csv(const TransferMatrix& matrix, const MatrixSummary& summary,
                      std::ostream& out);

} // namespace salescast
