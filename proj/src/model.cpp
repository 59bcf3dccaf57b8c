#include "salescast/model.hpp"

#include "salescast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace salescast {

std::vector<int> indicator(double t, const ChangepointGrid& grid) {
    std::vector<int> a(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        a[j] = t >= grid.locations[j] ? 1 : 0;
    }
    return a;
}

void TrendParams::bind_gammas() {
    gammas.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        gammas[j] = -grid.locations[j] * grid.deltas[j];
    }
}

bool TrendParams::gammas_bound(double tol) const {
    if (gammas.size() != grid.size()) return false;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (std::abs(gammas[j] + grid.locations[j] * grid.deltas[j]) > tol) return false;
    }
    return true;
}

double trend_value(double t, const TrendParams& params) {
    double rate = params.k;
    double offset = params.m;
    for (std::size_t j = 0; j < params.grid.size(); ++j) {
        if (t >= params.grid.locations[j]) {
            rate += params.grid.deltas[j];
            offset += params.gammas[j];
        }
    }
    return rate * t + offset;
}

void fourier_features_into(double days_since_t0, double period_days, int order,
                           std::span<double> out) {
    const double base = 2.0 * std::numbers::pi * days_since_t0 / period_days;
    for (int n = 1; n <= order; ++n) {
        const double angle = base * n;
        out[static_cast<std::size_t>(2 * (n - 1))] = std::cos(angle);
        out[static_cast<std::size_t>(2 * (n - 1) + 1)] = std::sin(angle);
    }
}

std::vector<double> fourier_features(Date date, const SeasonalityBlock& block, Date t0) {
    std::vector<double> features(static_cast<std::size_t>(2 * block.order));
    fourier_features_into(static_cast<double>(date - t0), block.period_days, block.order, features);
    return features;
}

double SeasonalityBlock::value(double days_since_t0) const {
    const double base = 2.0 * std::numbers::pi * days_since_t0 / period_days;
    double sum = 0.0;
    for (int n = 1; n <= order; ++n) {
        const double angle = base * n;
        sum += coefficients[static_cast<std::size_t>(2 * (n - 1))] * std::cos(angle);
        sum += coefficients[static_cast<std::size_t>(2 * (n - 1) + 1)] * std::sin(angle);
    }
    return sum;
}

double AdditiveModel::predict_log(Date d) const {
    double sum = trend_value(timescale.at(d), trend);
    const double days = timescale.days_since_origin(d);
    for (const auto& block : seasonalities) {
        sum += block.value(days);
    }
    return sum;
}

Forecast predict(const AdditiveModel& model, std::span<const Date> dates) {
    if (dates.empty()) throw DataError("predict requires at least one date");
    Forecast fc;
    fc.dates.assign(dates.begin(), dates.end());
    fc.yhat_log.resize(dates.size());
    fc.yhat.resize(dates.size());
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const double log_value = model.predict_log(dates[i]);
        fc.yhat_log[i] = log_value;
        fc.yhat[i] = std::exp2(log_value);
    }
    return fc;
}

ComponentDecomposition components(const AdditiveModel& model, std::span<const Date> dates) {
    if (dates.empty()) throw DataError("components requires at least one date");
    ComponentDecomposition out;
    out.dates.assign(dates.begin(), dates.end());
    out.trend.resize(dates.size());
    out.total_log.resize(dates.size());
    out.total.resize(dates.size());
    for (const auto& block : model.seasonalities) {
        out.seasonal.emplace_back(block.name, std::vector<double>(dates.size()));
    }
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const Date d = dates[i];
        double sum = trend_value(model.timescale.at(d), model.trend);
        out.trend[i] = sum;
        const double days = model.timescale.days_since_origin(d);
        for (std::size_t b = 0; b < model.seasonalities.size(); ++b) {
            const double v = model.seasonalities[b].value(days);
            out.seasonal[b].second[i] = v;
            sum += v;
        }
        out.total_log[i] = sum;
        out.total[i] = std::exp2(sum);
    }
    return out;
}

void write_components_csv(const ComponentDecomposition& decomposition, std::ostream& out) {
    auto find_block = [&](const std::string& name) -> const std::vector<double>* {
        for (const auto& [block_name, values] : decomposition.seasonal) {
            if (block_name == name) return &values;
        }
        return nullptr;
    };
    const auto* weekly = find_block("weekly");
    const auto* monthly = find_block("monthly");
    const auto* yearly = find_block("yearly");

    out << "date,trend,weekly,monthly,yearly,total_log,total";
    std::vector<const std::pair<std::string, std::vector<double>>*> custom;
    for (const auto& block : decomposition.seasonal) {
        if (block.first != "weekly" && block.first != "monthly" && block.first != "yearly") {
            custom.push_back(&block);
            out << ',' << block.first;
        }
    }
    out << '\n';

    for (std::size_t i = 0; i < decomposition.dates.size(); ++i) {
        out << decomposition.dates[i].to_string() << ',' << format_double(decomposition.trend[i])
            << ',' << format_double(weekly ? (*weekly)[i] : 0.0) << ','
            << format_double(monthly ? (*monthly)[i] : 0.0) << ','
            << format_double(yearly ? (*yearly)[i] : 0.0) << ','
            << format_double(decomposition.total_log[i]) << ','
            << format_double(decomposition.total[i]);
        for (const auto* block : custom) {
            out << ',' << format_double(block->second[i]);
        }
        out << '\n';
    }
}

} // namespace salescast
