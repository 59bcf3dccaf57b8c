#include "salescast/transfer.hpp"

#include "salescast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace salescast {

void AdaptConfig::validate() const {
    if (n_new_changepoints < 0) throw ConfigError("n_new_changepoints must be >= 0");
    if (lambda_anchor < 0.0) throw ConfigError("lambda_anchor must be >= 0");
    if (lambda_delta < 0.0) throw ConfigError("lambda_delta must be >= 0");
}

TransferRecord make_transfer_record(const std::string& source_entity,
                                    const std::string& target_entity, bool adapted,
                                    std::optional<DateRange> adapt_window) {
    return {adapted ? "adapted" : "zero_shot", source_entity, target_entity,
            std::move(adapt_window)};
}

Forecast zero_shot_forecast(const AdditiveModel& source, std::span<const Date> target_dates) {
    return predict(source, target_dates);
}

AdditiveModel transferred_copy(const AdditiveModel& source, const std::string& target_entity) {
    AdditiveModel copy = source;
    copy.entity_id = target_entity;
    copy.lineage.push_back(make_transfer_record(source.entity_id, target_entity, false));
    return copy;
}

namespace {

/// Reparameterizes the trend onto a longer span without changing any
/// prediction: k and delta scale by new/old, locations by old/new.
void rescale_trend(AdditiveModel& model, double new_span_days) {
    const double ratio = new_span_days / model.timescale.span_days;
    model.trend.k *= ratio;
    for (std::size_t j = 0; j < model.trend.grid.size(); ++j) {
        model.trend.grid.locations[j] /= ratio;
        model.trend.grid.deltas[j] *= ratio;
        // gamma_j = -s_j delta_j is invariant under this rescaling
    }
    model.timescale.span_days = new_span_days;
}

} // namespace

std::pair<AdditiveModel, FitDiagnostics> adapt(const AdditiveModel& source,
                                               const DailySeries& target, const AdaptConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    cfg.validate();
    if (!target.log_space) {
        throw DataError("adapt expects a log2-transformed target window (entity " +
                        target.entity_id + ")");
    }
    const std::vector<Date> dates = target.observed_dates();
    if (dates.size() < 14) {
        throw DataError("adaptation window needs at least 14 observations, got " +
                        std::to_string(dates.size()));
    }
    if (dates.front() <= source.training_window.start) {
        throw DataError("adaptation window must start strictly after the source training start " +
                        source.training_window.start.to_string());
    }

    AdditiveModel model = source;
    const double new_span =
        std::max(model.timescale.span_days, model.timescale.days_since_origin(dates.back()));
    rescale_trend(model, new_span);

    const std::size_t n_old = model.trend.grid.size();
    const double window_lo = model.timescale.at(dates.front());
    const double window_hi = model.timescale.at(dates.back());
    for (int j = 1; j <= cfg.n_new_changepoints; ++j) {
        const double s = window_lo + j * (window_hi - window_lo) / (cfg.n_new_changepoints + 1);
        model.trend.grid.locations.push_back(s);
        model.trend.grid.deltas.push_back(0.0);
    }
    // Old changepoints precede the adaptation window whenever the source was
    // trained before it; sort defensively in case the windows overlap.
    std::vector<std::size_t> order(model.trend.grid.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return model.trend.grid.locations[a] < model.trend.grid.locations[b];
    });
    ChangepointGrid sorted;
    std::vector<char> is_new;
    for (std::size_t i : order) {
        sorted.locations.push_back(model.trend.grid.locations[i]);
        sorted.deltas.push_back(model.trend.grid.deltas[i]);
        is_new.push_back(i >= n_old);
    }
    model.trend.grid = std::move(sorted);
    model.trend.bind_gammas();

    const Eigen::MatrixXd design =
        build_design_matrix(dates, model.trend.grid, model.seasonalities, model.timescale);
    Eigen::VectorXd response(static_cast<Eigen::Index>(dates.size()));
    for (std::size_t i = 0; i < dates.size(); ++i) {
        response[static_cast<Eigen::Index>(i)] = *target.at(dates[i]);
    }

    // Full parameter vector [k, m, delta..., seasonal coefficients...].
    const Eigen::Index n_params = design.cols();
    Eigen::VectorXd anchor(n_params);
    Eigen::VectorXd weights(n_params);
    std::vector<char> frozen(static_cast<std::size_t>(n_params), 0);

    anchor[0] = model.trend.k;
    weights[0] = cfg.lambda_anchor;
    anchor[1] = model.trend.m;
    weights[1] = cfg.lambda_anchor / 10.0;
    frozen[1] = !cfg.adapt_level;
    Eigen::Index c = 2;
    for (std::size_t j = 0; j < model.trend.grid.size(); ++j, ++c) {
        if (is_new[j]) {
            anchor[c] = 0.0;
            weights[c] = cfg.lambda_delta;
        } else {
            anchor[c] = model.trend.grid.deltas[j];
            weights[c] = cfg.lambda_anchor;
        }
    }
    for (const auto& block : model.seasonalities) {
        for (double coefficient : block.coefficients) {
            anchor[c] = coefficient;
            weights[c] = cfg.lambda_anchor;
            frozen[static_cast<std::size_t>(c)] = !cfg.adapt_seasonality;
            ++c;
        }
    }

    std::vector<Eigen::Index> free_cols;
    for (Eigen::Index i = 0; i < n_params; ++i) {
        if (!frozen[static_cast<std::size_t>(i)]) free_cols.push_back(i);
    }
    Eigen::MatrixXd design_free(design.rows(), static_cast<Eigen::Index>(free_cols.size()));
    Eigen::VectorXd anchor_free(static_cast<Eigen::Index>(free_cols.size()));
    Eigen::VectorXd weights_free(static_cast<Eigen::Index>(free_cols.size()));
    Eigen::VectorXd response_eff = response;
    for (Eigen::Index i = 0; i < n_params; ++i) {
        if (frozen[static_cast<std::size_t>(i)]) response_eff -= design.col(i) * anchor[i];
    }
    for (std::size_t i = 0; i < free_cols.size(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        design_free.col(idx) = design.col(free_cols[i]);
        anchor_free[idx] = anchor[free_cols[i]];
        weights_free[idx] = weights[free_cols[i]];
    }

    FitDiagnostics diagnostics;
    const Eigen::VectorXd theta_free =
        detail::solve_penalized(design_free, response_eff, weights_free, anchor_free, diagnostics);

    Eigen::VectorXd theta = anchor; // frozen entries stay at source values
    for (std::size_t i = 0; i < free_cols.size(); ++i) {
        theta[free_cols[i]] = theta_free[static_cast<Eigen::Index>(i)];
    }

    model.trend.k = theta[0];
    model.trend.m = theta[1];
    c = 2;
    for (std::size_t j = 0; j < model.trend.grid.size(); ++j, ++c) {
        model.trend.grid.deltas[j] = theta[c];
    }
    model.trend.bind_gammas();
    for (auto& block : model.seasonalities) {
        for (auto& coefficient : block.coefficients) coefficient = theta[c++];
    }

    const DateRange adapt_window{dates.front(), dates.back()};
    model.entity_id = target.entity_id;
    model.training_window = {source.training_window.start, dates.back()};
    model.lineage.push_back(
        make_transfer_record(source.entity_id, target.entity_id, true, adapt_window));

    diagnostics.elapsed = std::chrono::steady_clock::now() - t_start;
    return {std::move(model), diagnostics};
}

std::vector<ChangepointWeight> changepoint_weight_profile(const AdditiveModel& model) {
    std::vector<ChangepointWeight> profile;
    profile.reserve(model.trend.grid.size());
    for (std::size_t j = 0; j < model.trend.grid.size(); ++j) {
        const double day_offset = model.trend.grid.locations[j] * model.timescale.span_days;
        profile.push_back({model.timescale.t0 + static_cast<int>(std::lround(day_offset)),
                           std::abs(model.trend.grid.deltas[j])});
    }
    return profile;
}

void write_weight_profile_csv(std::span<const ChangepointWeight> profile, std::ostream& out) {
    out << "date,weight\n";
    for (const auto& entry : profile) {
        out << entry.date.to_string() << ',' << format_double(entry.weight) << '\n';
    }
}

} // namespace salescast
