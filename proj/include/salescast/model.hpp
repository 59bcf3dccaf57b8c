#pragma once

#include "salescast/date.hpp"
#include "salescast/series.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace salescast {

/// Maps calendar dates onto scaled time: t(t0) = 0, t(t0 + span_days) = 1.
struct TimeScale {
    Date t0{};
    double span_days = 1.0;

    double at(Date d) const { return static_cast<double>(d - t0) / span_days; }
    double days_since_origin(Date d) const { return static_cast<double>(d - t0); }
};

/// Changepoint locations s_j (strictly increasing scaled times in (0, 1])
/// with their growth-rate adjustments delta_j.
struct ChangepointGrid {
    std::vector<double> locations;
    std::vector<double> deltas;

    std::size_t size() const { return locations.size(); }
};

/// Indicator a(t): component j is 1 iff t >= s_j (a changepoint takes
/// effect on its own day).
std::vector<int> indicator(double t, const ChangepointGrid& grid);

/**
 * Piecewise-linear trend parameters in log2 space:
 *
 *   g(t) = (k + a(t)'delta) t + (m + a(t)'gamma)
 *
 * gamma_j = -s_j * delta_j keeps g continuous at every changepoint; that
 * binding is the default and bind_gammas() restores it after edits.
 */
struct TrendParams {
    double k = 0.0;
    double m = 0.0;
    ChangepointGrid grid;
    std::vector<double> gammas;

    void bind_gammas();
    bool gammas_bound(double tol = 1e-12) const;
};

double trend_value(double t, const TrendParams& params);

/// One Fourier seasonality component. Coefficients pair up as
/// [a_1, b_1, ..., a_N, b_N] against [cos, sin] features of frequency n.
struct SeasonalityBlock {
    std::string name;
    double period_days = 7.0;
    int order = 3;
    std::vector<double> coefficients; // 2 * order entries

    double value(double days_since_t0) const;
};

/// [cos(2 pi n d / P), sin(2 pi n d / P)] for n = 1..order, d measured in
/// absolute days since t0 so periods stay calendar-true.
std::vector<double> fourier_features(Date date, const SeasonalityBlock& block, Date t0);
void fourier_features_into(double days_since_t0, double period_days, int order,
                           std::span<double> out);

/// One fit/transfer/adaptation event in a model's history.
struct LineageEntry {
    std::string event; // "fit" | "zero_shot" | "adapted"
    std::string source_entity;
    std::string target_entity;
    std::optional<DateRange> window;
};

/**
 * The fitted additive regression model: piecewise-linear trend plus Fourier
 * seasonality blocks, operating on log2-transformed daily sales.
 * Observation-space predictions are exp2 of the log-space component sum.
 * Immutable after construction; evaluation never mutates it.
 */
struct AdditiveModel {
    TrendParams trend;
    std::vector<SeasonalityBlock> seasonalities;
    TimeScale timescale;
    bool log_space = true;
    DateRange training_window{};
    std::string entity_id;
    std::vector<LineageEntry> lineage;

    double predict_log(Date d) const;
};

Forecast predict(const AdditiveModel& model, std::span<const Date> dates);

/// Per-component log-space series; the componentwise sum equals the
/// log-space prediction.
struct ComponentDecomposition {
    std::vector<Date> dates;
    std::vector<double> trend;
    std::vector<std::pair<std::string, std::vector<double>>> seasonal;
    std::vector<double> total_log;
    std::vector<double> total;
};

ComponentDecomposition components(const AdditiveModel& model, std::span<const Date> dates);

/// Plot-data CSV: `date,trend,weekly,monthly,yearly,total_log,total`.
/// Absent standard blocks emit zeros; custom blocks append extra columns.
void write_components_csv(const ComponentDecomposition& decomposition, std::ostream& out);

} // namespace salescast
