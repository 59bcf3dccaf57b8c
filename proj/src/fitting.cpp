#include "salescast/fitting.hpp"

#include "salescast/errors.hpp"

#include <algorithm>
#include <cmath>

namespace salescast {

SeasonalitySpec weekly_spec() { return {"weekly", 7.0, 3}; }
SeasonalitySpec monthly_spec() { return {"monthly", 30.4375, 5}; }
SeasonalitySpec yearly_spec() { return {"yearly", 365.25, 10}; }

void FitConfig::validate() const {
    if (n_changepoints < 0) throw ConfigError("n_changepoints must be >= 0");
    if (!(changepoint_range > 0.0 && changepoint_range <= 1.0)) {
        throw ConfigError("changepoint_range must be in (0, 1]");
    }
    if (lambda_delta < 0.0 || lambda_season < 0.0) throw ConfigError("penalties must be >= 0");
    for (const auto& spec : seasonalities) {
        if (spec.order < 1) throw ConfigError("seasonality `" + spec.name + "` needs order >= 1");
        if (spec.period_days <= 0.0) throw ConfigError("seasonality `" + spec.name + "` needs a positive period");
    }
}

std::vector<double> place_changepoints(const DateRange& window, const FitConfig& cfg) {
    cfg.validate();
    if (window.n_days() < cfg.n_changepoints + 2) {
        throw ConfigError("training window of " + std::to_string(window.n_days()) +
                          " days is too short for " + std::to_string(cfg.n_changepoints) +
                          " changepoints");
    }
    std::vector<double> locations(static_cast<std::size_t>(cfg.n_changepoints));
    for (int j = 1; j <= cfg.n_changepoints; ++j) {
        locations[static_cast<std::size_t>(j - 1)] =
            j * cfg.changepoint_range / (cfg.n_changepoints + 1);
    }
    return locations;
}

Eigen::MatrixXd build_design_matrix(std::span<const Date> dates, const ChangepointGrid& grid,
                                    std::span<const SeasonalityBlock> blocks,
                                    const TimeScale& timescale) {
    std::size_t n_seasonal = 0;
    for (const auto& block : blocks) n_seasonal += static_cast<std::size_t>(2 * block.order);
    const std::size_t n_cols = 2 + grid.size() + n_seasonal;

    Eigen::MatrixXd design(static_cast<Eigen::Index>(dates.size()), static_cast<Eigen::Index>(n_cols));
    std::vector<double> features;
    for (std::size_t r = 0; r < dates.size(); ++r) {
        const Date d = dates[r];
        if (d < timescale.t0) {
            throw DataError("design matrix date " + d.to_string() + " precedes the time origin " +
                            timescale.t0.to_string());
        }
        const double t = timescale.at(d);
        const auto row = static_cast<Eigen::Index>(r);
        design(row, 0) = t;
        design(row, 1) = 1.0;
        std::size_t c = 2;
        for (std::size_t j = 0; j < grid.size(); ++j, ++c) {
            // With gamma bound, changepoint j contributes delta_j * a_j(t) * (t - s_j).
            design(row, static_cast<Eigen::Index>(c)) =
                t >= grid.locations[j] ? t - grid.locations[j] : 0.0;
        }
        const double days = timescale.days_since_origin(d);
        for (const auto& block : blocks) {
            features.resize(static_cast<std::size_t>(2 * block.order));
            fourier_features_into(days, block.period_days, block.order, features);
            for (double f : features) {
                design(row, static_cast<Eigen::Index>(c++)) = f;
            }
        }
    }
    return design;
}

namespace detail {

Eigen::VectorXd solve_penalized(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                                const Eigen::VectorXd& penalty_weights,
                                const Eigen::VectorXd& penalty_anchor, FitDiagnostics& diagnostics) {
    // Solve in anchor-shifted coordinates phi = theta - anchor; this keeps
    // the right-hand side at the data's magnitude even for huge anchor
    // weights, where forming X'y + W a directly would lose the gradient to
    // cancellation.
    const Eigen::VectorXd shifted_response = response - design * penalty_anchor;
    const Eigen::MatrixXd normal =
        design.transpose() * design + Eigen::MatrixXd(penalty_weights.asDiagonal());
    const Eigen::VectorXd rhs = design.transpose() * shifted_response;

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    Eigen::VectorXd phi = ldlt.solve(rhs);
    phi += ldlt.solve(rhs - normal * phi); // one refinement pass

    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    const double d_min = d.minCoeff();
    diagnostics.condition_estimate =
        d_min > 0.0 ? d.maxCoeff() / d_min : std::numeric_limits<double>::infinity();
    diagnostics.n_rows = static_cast<std::size_t>(design.rows());

    auto evaluate = [&](const Eigen::VectorXd& params) {
        const Eigen::VectorXd residual = design * params - shifted_response;
        diagnostics.objective_value =
            residual.squaredNorm() + params.cwiseProduct(penalty_weights).dot(params);
        const Eigen::VectorXd gradient =
            2.0 * (design.transpose() * residual) + 2.0 * penalty_weights.cwiseProduct(params);
        diagnostics.gradient_inf_norm = gradient.lpNorm<Eigen::Infinity>();
    };

    auto acceptable = [&](const Eigen::VectorXd& params) {
        if (!params.allFinite()) return false;
        evaluate(params);
        return diagnostics.gradient_inf_norm <= 1e-6 * (1.0 + std::abs(diagnostics.objective_value));
    };

    if (!acceptable(phi)) {
        // Rank-deficient normal equations (e.g. unpenalized collinear
        // changepoint columns): fall back to a minimum-norm solve.
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(normal);
        phi = cod.solve(rhs);
        if (!acceptable(phi)) {
            throw NumericalError("normal equations are ill-conditioned beyond ridge repair "
                                 "(condition estimate " +
                                     format_double(diagnostics.condition_estimate) + ")",
                                 diagnostics.condition_estimate);
        }
    }
    return penalty_anchor + phi;
}

} // namespace detail

std::pair<AdditiveModel, FitDiagnostics> fit(const DailySeries& series, const FitConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    cfg.validate();
    if (!series.log_space) {
        throw DataError("fit expects a log2-transformed series (entity " + series.entity_id + ")");
    }
    const std::vector<Date> dates = series.observed_dates();
    if (dates.size() < 14) {
        throw DataError("fit needs at least 14 observations, got " + std::to_string(dates.size()));
    }

    const Date first = dates.front();
    const Date last = dates.back();
    TimeScale timescale{first, static_cast<double>(last - first)};

    ChangepointGrid grid;
    grid.locations = place_changepoints({first, last}, cfg);
    grid.deltas.assign(grid.locations.size(), 0.0);

    std::vector<SeasonalityBlock> blocks;
    blocks.reserve(cfg.seasonalities.size());
    for (const auto& spec : cfg.seasonalities) {
        blocks.push_back({spec.name, spec.period_days, spec.order,
                          std::vector<double>(static_cast<std::size_t>(2 * spec.order), 0.0)});
    }

    const Eigen::MatrixXd design = build_design_matrix(dates, grid, blocks, timescale);
    Eigen::VectorXd response(static_cast<Eigen::Index>(dates.size()));
    for (std::size_t i = 0; i < dates.size(); ++i) {
        response[static_cast<Eigen::Index>(i)] = *series.at(dates[i]);
    }

    Eigen::VectorXd weights = Eigen::VectorXd::Zero(design.cols());
    Eigen::Index c = 2;
    for (std::size_t j = 0; j < grid.size(); ++j) weights[c++] = cfg.lambda_delta;
    for (const auto& block : blocks) {
        for (int i = 0; i < 2 * block.order; ++i) weights[c++] = cfg.lambda_season;
    }

    FitDiagnostics diagnostics;
    const Eigen::VectorXd theta = detail::solve_penalized(
        design, response, weights, Eigen::VectorXd::Zero(design.cols()), diagnostics);

    AdditiveModel model;
    model.trend.k = theta[0];
    model.trend.m = theta[1];
    model.trend.grid = grid;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        model.trend.grid.deltas[j] = theta[static_cast<Eigen::Index>(2 + j)];
    }
    model.trend.bind_gammas();
    c = static_cast<Eigen::Index>(2 + grid.size());
    for (auto& block : blocks) {
        for (auto& coefficient : block.coefficients) coefficient = theta[c++];
    }
    model.seasonalities = std::move(blocks);
    model.timescale = timescale;
    model.log_space = true;
    model.training_window = {first, last};
    model.entity_id = series.entity_id;
    model.lineage.push_back({"fit", series.entity_id, "", model.training_window});

    diagnostics.elapsed = std::chrono::steady_clock::now() - t_start;
    return {std::move(model), diagnostics};
}

namespace {

DailySeries slice_checked(const DailySeries& series, const DateRange& window,
                          const std::string& role) {
    if (series.empty() || series.start > window.start || series.end_date() < window.end) {
        const std::string have = series.empty()
                                     ? "no data"
                                     : series.start.to_string() + ".." + series.end_date().to_string();
        throw ScenarioError("entity " + series.entity_id + " does not cover the " + role +
                            " window " + window.start.to_string() + ".." + window.end.to_string() +
                            " (have " + have + ")");
    }
    return series.slice(window.start, window.end);
}

} // namespace

ScenarioSplit split_train_test(const DailySeries& series, const ScenarioConfig& scenario) {
    scenario.validate();
    ScenarioSplit split;
    split.test = slice_checked(series, scenario.test_window(), "test");

    if (scenario.id == ScenarioId::s1a) {
        split.train = slice_checked(series, scenario.train_window_fixed(), "training");
    } else {
        const Date cutoff = scenario.train_end();
        if (series.empty() || series.start > cutoff) {
            throw ScenarioError("entity " + series.entity_id + " has no data on or before the " +
                                "training cutoff " + cutoff.to_string());
        }
        split.train = series.slice(series.start, std::min(cutoff, series.end_date()));
    }

    if (scenario.has_adaptation()) {
        split.adapt = slice_checked(series, scenario.adapt_window(), "adaptation");
    }
    return split;
}

} // namespace salescast
