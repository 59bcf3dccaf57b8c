#pragma once

#include "salescast/model.hpp"
#include "salescast/scenario.hpp"
#include "salescast/series.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace salescast {

/// Requested seasonality component: name, period in days, Fourier order.
struct SeasonalitySpec {
    std::string name;
    double period_days = 7.0;
    int order = 3;
};

SeasonalitySpec weekly_spec();  // P = 7, order 3
SeasonalitySpec monthly_spec(); // P = 30.4375, order 5
SeasonalitySpec yearly_spec();  // P = 365.25, order 10

/**
 * Ridge-regression fit settings. The model is linear in (k, m, delta,
 * seasonal coefficients) once gamma is bound, so the fit is a penalized
 * least-squares solve; k and m are never penalized.
 */
struct FitConfig {
    int n_changepoints = 25;
    double changepoint_range = 0.8; // fraction of the span holding changepoints
    double lambda_delta = 1.0;      // L2 penalty on rate adjustments
    double lambda_season = 0.1;     // L2 penalty on seasonal coefficients
    std::vector<SeasonalitySpec> seasonalities = {weekly_spec(), yearly_spec()};

    void validate() const;
};

struct FitDiagnostics {
    double objective_value = 0.0;
    double gradient_inf_norm = 0.0;
    std::size_t n_rows = 0;
    double condition_estimate = 0.0;
    std::chrono::duration<double> elapsed{0.0};
};

/// Uniform changepoint locations s_j = j * range / (n + 1), j = 1..n,
/// exclusive of both t=0 and the range endpoint.
std::vector<double> place_changepoints(const DateRange& window, const FitConfig& cfg);

/**
 * Rows are dates; columns are [t, 1, per-changepoint a_j(t)(t - s_j),
 * per-block Fourier features]. With gamma bound to -s_j delta_j the model is
 * exactly linear in the parameter vector [k, m, delta, coefficients], and
 * matrix * params reproduces the log-space prediction.
 */
Eigen::MatrixXd build_design_matrix(std::span<const Date> dates, const ChangepointGrid& grid,
                                    std::span<const SeasonalityBlock> blocks,
                                    const TimeScale& timescale);

/// Fits the additive model to a log2-space series by ridge-penalized normal
/// equations. Requires >= 14 observations; gap days contribute no rows.
std::pair<AdditiveModel, FitDiagnostics> fit(const DailySeries& series, const FitConfig& cfg = {});

struct ScenarioSplit {
    DailySeries train;
    std::optional<DailySeries> adapt;
    DailySeries test;
};

/// Cuts the series into the scenario's disjoint train/adapt/test windows;
/// missing coverage raises ScenarioError naming the gap.
ScenarioSplit split_train_test(const DailySeries& series, const ScenarioConfig& scenario);

namespace detail {

/// Shared ridge solve: minimizes ||y - X theta||^2 + (theta - anchor)' W
/// (theta - anchor) with W diagonal. Returns the solution and fills
/// diagnostics (objective, gradient, condition estimate).
Eigen::VectorXd solve_penalized(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                                const Eigen::VectorXd& penalty_weights,
                                const Eigen::VectorXd& penalty_anchor, FitDiagnostics& diagnostics);

} // namespace detail

} // namespace salescast
