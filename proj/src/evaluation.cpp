#include "salescast/evaluation.hpp"

#include "salescast/errors.hpp"
#include "salescast/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace salescast {

MapeResult mape(const DailySeries& actual, const Forecast& forecast) {
    MapeResult result;
    double sum = 0.0;
    std::size_t n_common = 0;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        const Date d = forecast.dates[i];
        if (!actual.in_range(d)) continue;
        ++n_common;
        const auto y = actual.at(d);
        if (!y || *y <= 0.0 || is_gap_value(forecast.yhat[i])) {
            ++result.n_excluded;
            continue;
        }
        sum += std::abs(*y - forecast.yhat[i]) / *y;
        ++result.n_included;
    }
    if (n_common == 0) throw EvaluationError("no common days between actuals and forecast");
    if (result.n_included == 0) throw EvaluationError("all common days were excluded from MAPE");
    result.percent = 100.0 * sum / static_cast<double>(result.n_included);
    return result;
}

double rmse(const DailySeries& actual, const Forecast& forecast) {
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        const auto y = actual.at(forecast.dates[i]);
        if (!y || is_gap_value(forecast.yhat[i])) continue;
        const double e = *y - forecast.yhat[i];
        sum_sq += e * e;
        ++n;
    }
    if (n == 0) throw EvaluationError("no common days between actuals and forecast");
    return std::sqrt(sum_sq / static_cast<double>(n));
}

namespace {

Date previous_year_same_day(Date d) {
    const int year = d.year() - 1;
    int month = d.month();
    int day = d.day();
    if (month == 2 && day == 29) day = 28;
    return Date::from_ymd(year, month, day);
}

} // namespace

Forecast seasonal_naive(const DailySeries& history, const DateRange& test_window) {
    Forecast fc;
    std::size_t n_resolved = 0;
    for (Date d = test_window.start; d <= test_window.end; ++d) {
        const Date source = previous_year_same_day(d);
        std::optional<double> value = history.at(source);
        if (!value) {
            // The unique day within +-3 of the source sharing the test day's weekday.
            const int k0 = (((d - source) % 7) + 7) % 7;
            const int k = k0 <= 3 ? k0 : k0 - 7;
            value = history.at(source + k);
        }
        if (!value) {
            for (int step : {-1, 1, -2, 2, -3, 3}) {
                value = history.at(source + step);
                if (value) break;
            }
        }
        fc.dates.push_back(d);
        fc.yhat.push_back(value ? *value : kGap);
        fc.yhat_log.push_back(value && *value > 0.0 ? std::log2(*value) : kGap);
        if (value) ++n_resolved;
    }
    if (n_resolved == 0) {
        throw EvaluationError("seasonal naive could not resolve a source day for any test day in " +
                              test_window.start.to_string() + ".." + test_window.end.to_string());
    }
    return fc;
}

MonthlyMape monthly_average_mape(const DailySeries& actual, const Forecast& forecast,
                                 const DateRange& window) {
    if (window.start.day() != 1 || window.end != month_end(window.end.year(), window.end.month())) {
        throw EvaluationError("monthly MAPE window must span whole calendar months");
    }
    const int n_months = span_months(window.start, window.end);

    std::vector<double> sums(static_cast<std::size_t>(n_months), 0.0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_months), 0);
    MonthlyMape result;
    double pooled_sum = 0.0;
    std::size_t pooled_count = 0;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        const Date d = forecast.dates[i];
        if (!window.contains(d) || !actual.in_range(d)) continue;
        const auto y = actual.at(d);
        if (!y || *y <= 0.0 || is_gap_value(forecast.yhat[i])) {
            ++result.n_excluded;
            continue;
        }
        const auto bucket = static_cast<std::size_t>((d.year() - window.start.year()) * 12 +
                                                     d.month() - window.start.month());
        sums[bucket] += std::abs(*y - forecast.yhat[i]) / *y;
        ++counts[bucket];
        pooled_sum += std::abs(*y - forecast.yhat[i]) / *y;
        ++pooled_count;
    }

    result.monthly.resize(static_cast<std::size_t>(n_months), kGap);
    double mean_sum = 0.0;
    for (std::size_t b = 0; b < result.monthly.size(); ++b) {
        if (counts[b] == 0) continue; // month with zero valid days is skipped
        result.monthly[b] = 100.0 * sums[b] / static_cast<double>(counts[b]);
        mean_sum += result.monthly[b];
        ++result.n_months_with_data;
    }
    if (result.n_months_with_data == 0) {
        throw EvaluationError("no month in the window has a valid day");
    }
    result.mean = mean_sum / result.n_months_with_data;
    result.pooled = 100.0 * pooled_sum / static_cast<double>(pooled_count);
    return result;
}

double percentage_change(double perf1, double perf2) {
    if (perf2 <= 0.0) {
        throw EvaluationError("undefined comparison: reference performance must be positive");
    }
    return 100.0 * (perf1 / perf2 - 1.0);
}

namespace {

struct CellStats {
    double avg = kGap;
    double sd = kGap;
};

// Sample standard deviation; single defined cell -> SD 0.
CellStats stats_over(const std::vector<double>& values) {
    std::vector<double> defined;
    for (double v : values) {
        if (!is_gap_value(v)) defined.push_back(v);
    }
    CellStats stats;
    if (defined.empty()) return stats;
    double sum = 0.0;
    for (double v : defined) sum += v;
    stats.avg = sum / static_cast<double>(defined.size());
    if (defined.size() == 1) {
        stats.sd = 0.0;
        return stats;
    }
    double ss = 0.0;
    for (double v : defined) ss += (v - stats.avg) * (v - stats.avg);
    stats.sd = std::sqrt(ss / static_cast<double>(defined.size() - 1));
    return stats;
}

} // namespace

MatrixSummary transfer_matrix_summary(const TransferMatrix& matrix) {
    MatrixSummary summary;
    const std::size_t n_targets = matrix.targets.size();
    const std::size_t n_sources = matrix.sources.size();
    for (std::size_t t = 0; t < n_targets; ++t) {
        const auto stats = stats_over(matrix.cells[t]);
        summary.row_avg.push_back(stats.avg);
        summary.row_sd.push_back(stats.sd);
        std::size_t best = n_sources;
        for (std::size_t s = 0; s < n_sources; ++s) {
            const double v = matrix.cells[t][s];
            if (is_gap_value(v)) continue;
            if (best == n_sources || v < matrix.cells[t][best]) best = s;
        }
        summary.best_per_target.push_back(best);
    }
    for (std::size_t s = 0; s < n_sources; ++s) {
        std::vector<double> column;
        for (std::size_t t = 0; t < n_targets; ++t) column.push_back(matrix.cells[t][s]);
        const auto stats = stats_over(column);
        summary.col_avg.push_back(stats.avg);
        summary.col_sd.push_back(stats.sd);
    }
    return summary;
}

namespace {

std::vector<Date> test_dates(const ScenarioConfig& scenario) {
    return date_range_days(scenario.test_window());
}

EvaluationReport infeasible_report(const std::string& entity, const ScenarioConfig& scenario,
                                   const std::string& why) {
    EvaluationReport report;
    report.entity_id = entity;
    report.scenario = to_string(scenario.id);
    report.feasible = false;
    report.message = why;
    return report;
}

void fill_metrics(EvaluationReport& report, const DailySeries& test_actual, const Forecast& fc,
                  const DailySeries& full_history, const ScenarioConfig& scenario) {
    const DateRange window = scenario.test_window();
    const MonthlyMape mm = monthly_average_mape(test_actual, fc, window);
    report.mape_monthly = mm.monthly;
    report.mape_mean = mm.mean;
    report.mape_pooled = mm.pooled;
    report.rmse_value = rmse(test_actual, fc);
    report.n_excluded_days = mm.n_excluded;
    report.test_window = window;

    const Forecast baseline = seasonal_naive(full_history, window);
    report.baseline_mape = monthly_average_mape(test_actual, baseline, window).mean;
    if (report.baseline_mape > 0.0) {
        report.comparisons["baseline"] = percentage_change(report.mape_mean, report.baseline_mape);
    }
}

DailySeries to_log(const DailySeries& series) { return log2_transform(zeros_to_gaps(series)); }

ScenarioResult run_scenario_impl(const std::map<std::string, DailySeries>& entities,
                                 const ScenarioConfig& scenario, const FitConfig& fit_cfg,
                                 const AdaptConfig& adapt_cfg, bool with_references);

// Best-case MAPE per entity from a reference run of another scenario.
std::map<std::string, double> reference_mapes(const std::map<std::string, DailySeries>& entities,
                                              const ScenarioConfig& base, ScenarioId reference,
                                              const FitConfig& fit_cfg,
                                              const AdaptConfig& adapt_cfg) {
    ScenarioConfig cfg;
    cfg.id = reference;
    cfg.test_year = base.test_year;
    cfg.horizon_months = base.horizon_months;
    const ScenarioResult result = run_scenario_impl(entities, cfg, fit_cfg, adapt_cfg, false);
    std::map<std::string, double> mapes;
    for (const auto& [entity, report] : result.reports) {
        if (report.feasible) mapes.emplace(entity, report.mape_mean);
    }
    return mapes;
}

// The published comparisons: every scenario against the baseline, transfer
// scenarios additionally against the isolated fits (and the adapted one
// against zero shot).
void add_cross_comparisons(ScenarioResult& result,
                           const std::map<std::string, DailySeries>& entities,
                           const ScenarioConfig& scenario, const FitConfig& fit_cfg,
                           const AdaptConfig& adapt_cfg) {
    std::map<std::string, std::map<std::string, double>> references;
    if (scenario.id != ScenarioId::s1a) {
        references["scenario_1a"] =
            reference_mapes(entities, scenario, ScenarioId::s1a, fit_cfg, adapt_cfg);
    }
    if (scenario.uses_transfer()) {
        references["scenario_1b"] =
            reference_mapes(entities, scenario, ScenarioId::s1b, fit_cfg, adapt_cfg);
    }
    if (scenario.id == ScenarioId::s3) {
        references["scenario_2"] =
            reference_mapes(entities, scenario, ScenarioId::s2, fit_cfg, adapt_cfg);
    }
    for (auto& [entity, report] : result.reports) {
        if (!report.feasible) continue;
        for (const auto& [name, mapes] : references) {
            const auto it = mapes.find(entity);
            if (it != mapes.end() && it->second > 0.0) {
                report.comparisons[name] = percentage_change(report.mape_mean, it->second);
            }
        }
    }
}

} // namespace

ScenarioResult run_scenario(const std::map<std::string, DailySeries>& entities,
                            const ScenarioConfig& scenario, const FitConfig& fit_cfg,
                            const AdaptConfig& adapt_cfg) {
    return run_scenario_impl(entities, scenario, fit_cfg, adapt_cfg, true);
}

namespace {

ScenarioResult run_scenario_impl(const std::map<std::string, DailySeries>& entities,
                                 const ScenarioConfig& scenario, const FitConfig& fit_cfg,
                                 const AdaptConfig& adapt_cfg, bool with_references) {
    scenario.validate();
    fit_cfg.validate();
    adapt_cfg.validate();
    ScenarioResult result;
    result.config = scenario;

    if (!scenario.uses_transfer()) {
        for (const auto& [entity, series] : entities) {
            try {
                const ScenarioSplit split = split_train_test(series, scenario);
                auto [model, diagnostics] = fit(to_log(split.train), fit_cfg);
                const Forecast fc = predict(model, test_dates(scenario));
                EvaluationReport report;
                report.entity_id = entity;
                report.scenario = to_string(scenario.id);
                report.train_window = model.training_window;
                fill_metrics(report, split.test, fc, series, scenario);
                result.reports.emplace(entity, std::move(report));
                result.models.emplace(entity, std::move(model));
            } catch (const Error& e) {
                result.reports.emplace(entity, infeasible_report(entity, scenario, e.what()));
            }
        }
        if (with_references) {
            add_cross_comparisons(result, entities, scenario, fit_cfg, adapt_cfg);
        }
        return result;
    }

    // Transfer scenarios: fit every source once, evaluate all ordered pairs.
    std::map<std::string, AdditiveModel> source_models;
    std::map<std::string, std::string> source_errors;
    for (const auto& [entity, series] : entities) {
        try {
            const ScenarioSplit split = split_train_test(series, scenario);
            source_models.emplace(entity, fit(to_log(split.train), fit_cfg).first);
        } catch (const Error& e) {
            source_errors.emplace(entity, e.what());
        }
    }

    TransferMatrix matrix;
    for (const auto& [entity, series] : entities) {
        matrix.sources.push_back(entity);
        matrix.targets.push_back(entity);
    }
    matrix.cells.assign(matrix.targets.size(),
                        std::vector<double>(matrix.sources.size(), kGap));

    const std::vector<Date> dates = test_dates(scenario);
    for (std::size_t t = 0; t < matrix.targets.size(); ++t) {
        const std::string& target = matrix.targets[t];
        const DailySeries& target_series = entities.at(target);
        EvaluationReport report;
        report.entity_id = target;
        report.scenario = to_string(scenario.id);
        try {
            const ScenarioSplit target_split = split_train_test(target_series, scenario);
            std::optional<DailySeries> adapt_log;
            if (scenario.has_adaptation()) {
                adapt_log = to_log(*target_split.adapt);
                report.adapt_window = scenario.adapt_window();
            }
            double best_mape = kGap;
            for (std::size_t s = 0; s < matrix.sources.size(); ++s) {
                const std::string& source = matrix.sources[s];
                if (source == target) continue; // cases i = j are ignored
                const auto it = source_models.find(source);
                if (it == source_models.end()) continue;
                Forecast fc;
                if (scenario.has_adaptation()) {
                    fc = predict(adapt(it->second, *adapt_log, adapt_cfg).first, dates);
                } else {
                    fc = zero_shot_forecast(it->second, dates);
                }
                const MonthlyMape mm = monthly_average_mape(target_split.test, fc, scenario.test_window());
                matrix.cells[t][s] = mm.mean;
                if (is_gap_value(best_mape) || mm.mean < best_mape) {
                    best_mape = mm.mean;
                    report.best_source = source;
                    report.mape_monthly = mm.monthly;
                    report.mape_mean = mm.mean;
                    report.mape_pooled = mm.pooled;
                    report.n_excluded_days = mm.n_excluded;
                    report.rmse_value = rmse(target_split.test, fc);
                }
            }
            if (is_gap_value(best_mape)) {
                throw ScenarioError("no feasible source model for target " + target);
            }
            const AdditiveModel& best_model = source_models.at(report.best_source);
            if (scenario.has_adaptation()) {
                result.models.emplace(target, adapt(best_model, *adapt_log, adapt_cfg).first);
            } else {
                result.models.emplace(target, transferred_copy(best_model, target));
            }
            report.train_window = {entities.at(report.best_source).start, scenario.train_end()};
            report.test_window = scenario.test_window();
            const Forecast baseline = seasonal_naive(target_series, scenario.test_window());
            report.baseline_mape =
                monthly_average_mape(target_split.test, baseline, scenario.test_window()).mean;
            if (report.baseline_mape > 0.0) {
                report.comparisons["baseline"] =
                    percentage_change(report.mape_mean, report.baseline_mape);
            }
            result.reports.emplace(target, std::move(report));
        } catch (const Error& e) {
            result.reports.emplace(target, infeasible_report(target, scenario, e.what()));
        }
    }
    for (const auto& [entity, why] : source_errors) {
        if (!result.reports.count(entity)) {
            result.reports.emplace(entity, infeasible_report(entity, scenario, why));
        }
    }

    result.matrix_summary = transfer_matrix_summary(matrix);
    result.matrix = std::move(matrix);
    if (with_references) {
        add_cross_comparisons(result, entities, scenario, fit_cfg, adapt_cfg);
    }
    return result;
}

} // namespace

namespace {

nlohmann::json json_number(double v) {
    if (is_gap_value(v)) return nullptr;
    return v;
}

nlohmann::json range_json(const DateRange& range) {
    return {{"start", range.start.to_string()}, {"end", range.end.to_string()}};
}

} // namespace

void write_report_json(const ScenarioResult& result, std::ostream& out) {
    nlohmann::json doc;
    doc["scenario"] = to_string(result.config.id);
    doc["test_year"] = result.config.test_year;
    doc["horizon_months"] = result.config.horizon_months;

    nlohmann::json entities = nlohmann::json::object();
    for (const auto& [entity, report] : result.reports) {
        nlohmann::json r;
        r["entity_id"] = report.entity_id;
        r["scenario"] = report.scenario;
        r["feasible"] = report.feasible;
        if (!report.feasible) {
            r["message"] = report.message;
            entities[entity] = std::move(r);
            continue;
        }
        nlohmann::json monthly = nlohmann::json::array();
        for (double v : report.mape_monthly) monthly.push_back(json_number(v));
        r["mape_monthly"] = std::move(monthly);
        r["mape_mean"] = json_number(report.mape_mean);
        r["mape_pooled"] = json_number(report.mape_pooled);
        r["rmse"] = json_number(report.rmse_value);
        r["n_excluded_days"] = report.n_excluded_days;
        r["baseline_mape"] = json_number(report.baseline_mape);
        if (result.config.uses_transfer()) {
            r["mode"] = result.config.has_adaptation() ? "adapted" : "zero_shot";
        }
        if (!report.best_source.empty()) r["best_source"] = report.best_source;
        r["comparisons"] = report.comparisons;
        r["train_window"] = range_json(report.train_window);
        r["test_window"] = range_json(report.test_window);
        if (report.adapt_window) r["adapt_window"] = range_json(*report.adapt_window);
        entities[entity] = std::move(r);
    }
    doc["entities"] = std::move(entities);

    if (result.matrix && result.matrix_summary) {
        const auto& matrix = *result.matrix;
        const auto& summary = *result.matrix_summary;
        nlohmann::json m;
        m["sources"] = matrix.sources;
        m["targets"] = matrix.targets;
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& row : matrix.cells) {
            nlohmann::json r = nlohmann::json::array();
            for (double v : row) r.push_back(json_number(v));
            cells.push_back(std::move(r));
        }
        m["cells"] = std::move(cells);
        auto number_list = [](const std::vector<double>& values) {
            nlohmann::json arr = nlohmann::json::array();
            for (double v : values) arr.push_back(json_number(v));
            return arr;
        };
        m["row_avg"] = number_list(summary.row_avg);
        m["row_sd"] = number_list(summary.row_sd);
        m["col_avg"] = number_list(summary.col_avg);
        m["col_sd"] = number_list(summary.col_sd);
        nlohmann::json best = nlohmann::json::array();
        for (std::size_t t = 0; t < matrix.targets.size(); ++t) {
            const std::size_t s = summary.best_per_target[t];
            best.push_back(s < matrix.sources.size() ? nlohmann::json(matrix.sources[s])
                                                     : nlohmann::json(nullptr));
        }
        m["best_per_target"] = std::move(best);
        doc["matrix"] = std::move(m);
    }
    out << doc.dump(2) << '\n';
}

void write_matrix_csv(const TransferMatrix& matrix, const MatrixSummary& summary,
                      std::ostream& out) {
    auto cell_text = [](double v) { return is_gap_value(v) ? std::string() : format_double(v); };
    out << "target";
    for (const auto& source : matrix.sources) out << ',' << source;
    out << ",AVG,SD,BEST\n";
    for (std::size_t t = 0; t < matrix.targets.size(); ++t) {
        out << matrix.targets[t];
        for (std::size_t s = 0; s < matrix.sources.size(); ++s) {
            out << ',' << cell_text(matrix.cells[t][s]);
        }
        out << ',' << cell_text(summary.row_avg[t]) << ',' << cell_text(summary.row_sd[t]);
        const std::size_t best = summary.best_per_target[t];
        out << ',' << (best < matrix.sources.size() ? matrix.sources[best] : "") << '\n';
    }
    out << "AVG";
    for (double v : summary.col_avg) out << ',' << cell_text(v);
    out << ",,,\nSD";
    for (double v : summary.col_sd) out << ',' << cell_text(v);
    out << ",,,\n";
}

} // namespace salescast
