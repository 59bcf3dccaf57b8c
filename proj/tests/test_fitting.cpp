#include "salescast/fitting.hpp"
#include "salescast/errors.hpp"
#include "salescast/synthetic.hpp"
#include "salescast/pipeline.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <random>

using namespace salescast;

namespace {

// y(d) = slope * t(d) + intercept over `n_days` consecutive days, log-space.
DailySeries line_series(double slope, double intercept, int n_days) {
    DailySeries series;
    series.entity_id = "line";
    series.start = Date::from_ymd(2016, 1, 1);
    series.log_space = true;
    const double span = n_days - 1;
    for (int i = 0; i < n_days; ++i) {
        series.values.push_back(slope * (i / span) + intercept);
    }
    return series;
}

DailySeries noisy_series(std::uint64_t seed, int n_days) {
    const std::array<double, 7> weekly = {0.9, 0.85, 0.95, 1.05, 1.3, 1.4, 0.7};
    DailySeries series;
    series.entity_id = "noisy";
    series.start = Date::from_ymd(2015, 1, 1);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.1);
    for (int i = 0; i < n_days; ++i) {
        const Date d = series.start + i;
        const double v = 900.0 * (1.0 + 0.05 * i / 365.25) *
                         weekly[static_cast<std::size_t>(d.weekday())] * std::exp(noise(rng));
        series.values.push_back(v);
    }
    return log2_transform(series);
}

} // namespace

TEST_CASE("place_changepoints spaces locations uniformly") {
    FitConfig cfg;
    cfg.n_changepoints = 3;
    cfg.changepoint_range = 0.8;
    const DateRange window{Date::from_ymd(2016, 1, 1), Date::from_ymd(2016, 12, 31)};
    const auto s = place_changepoints(window, cfg);
    REQUIRE(s.size() == 3);
    CHECK(s[0] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(s[1] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(s[2] == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("place_changepoints: empty grid, range bound, short window") {
    FitConfig cfg;
    cfg.n_changepoints = 0;
    const DateRange window{Date::from_ymd(2016, 1, 1), Date::from_ymd(2016, 2, 1)};
    CHECK(place_changepoints(window, cfg).empty());

    std::mt19937 rng(5);
    std::uniform_int_distribution<int> count(1, 40);
    std::uniform_real_distribution<double> range(0.05, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        cfg.n_changepoints = count(rng);
        cfg.changepoint_range = range(rng);
        const DateRange long_window{Date::from_ymd(2014, 1, 1), Date::from_ymd(2016, 12, 31)};
        const auto s = place_changepoints(long_window, cfg);
        REQUIRE(s.size() == static_cast<std::size_t>(cfg.n_changepoints));
        for (double v : s) CHECK(v <= cfg.changepoint_range + 1e-12);
        CHECK(std::is_sorted(s.begin(), s.end()));
        CHECK(s.front() > 0.0);
    }

    cfg.n_changepoints = 40;
    const DateRange tiny{Date::from_ymd(2016, 1, 1), Date::from_ymd(2016, 1, 20)};
    CHECK_THROWS_AS(place_changepoints(tiny, cfg), ConfigError);
}

TEST_CASE("design matrix columns") {
    const TimeScale scale{Date::from_ymd(2016, 1, 1), 100.0};
    const std::vector<Date> dates = {scale.t0, scale.t0 + 50, scale.t0 + 75};

    SUBCASE("plain line") {
        const auto design = build_design_matrix(dates, {}, {}, scale);
        REQUIRE(design.cols() == 2);
        CHECK(design(1, 0) == doctest::Approx(0.5));
        CHECK(design(1, 1) == 1.0);
        // params (k, m) reproduce the exact line
        Eigen::VectorXd params(2);
        params << 2.0, 1.0;
        const Eigen::VectorXd y = design * params;
        CHECK(y[2] == doctest::Approx(2.0 * 0.75 + 1.0));
    }

    SUBCASE("changepoint column is a_j(t) (t - s_j)") {
        ChangepointGrid grid;
        grid.locations = {0.5};
        grid.deltas = {0.0};
        const auto design = build_design_matrix(dates, grid, {}, scale);
        REQUIRE(design.cols() == 3);
        CHECK(design(0, 2) == 0.0);
        CHECK(design(1, 2) == doctest::Approx(0.0));
        CHECK(design(2, 2) == doctest::Approx(0.25));
    }

    SUBCASE("dates before the origin are rejected") {
        const std::vector<Date> bad = {scale.t0 - 1};
        CHECK_THROWS_AS(build_design_matrix(bad, {}, {}, scale), DataError);
    }
}

TEST_CASE("fit recovers a noiseless line") {
    const DailySeries series = line_series(2.0, 1.0, 120);
    FitConfig cfg; // default changepoints; ridge pushes deltas to zero exactly
    const auto [model, diagnostics] = fit(series, cfg);
    CHECK(model.trend.k == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(model.trend.m == doctest::Approx(1.0).epsilon(1e-6));
    for (double d : model.trend.grid.deltas) CHECK(std::abs(d) < 1e-6);
    CHECK(diagnostics.gradient_inf_norm <=
          1e-6 * (1.0 + std::abs(diagnostics.objective_value)));
    CHECK(diagnostics.n_rows == 120);
}

TEST_CASE("fit reproduces a noiseless weekly pattern") {
    BranchSpec spec;
    spec.entity_id = "wk";
    spec.base_level = 1000.0;
    spec.growth_per_year = 0.06;
    spec.weekly_pattern = {0.9, 0.85, 0.95, 1.05, 1.3, 1.4, 0.7};
    spec.noise_sigma = 0.0;
    spec.span = {Date::from_ymd(2014, 1, 1), Date::from_ymd(2016, 12, 31)};
    const DailySeries observed = generate_branch(spec);
    const DailySeries logged = log2_transform(observed);

    FitConfig cfg;
    cfg.seasonalities = {weekly_spec()};
    const auto [model, diagnostics] = fit(logged, cfg);
    const Forecast fc = predict(model, logged.observed_dates());
    double max_err = 0.0;
    std::size_t i = 0;
    for (const Date d : logged.observed_dates()) {
        max_err = std::max(max_err, std::abs(fc.yhat_log[i++] - *logged.at(d)));
    }
    CHECK(max_err < 1e-4);
}

TEST_CASE("design matrix times parameters equals the log-space prediction") {
    const DailySeries series = noisy_series(77, 300);
    FitConfig cfg;
    cfg.n_changepoints = 10;
    const auto [model, diagnostics] = fit(series, cfg);
    const std::vector<Date> dates = series.observed_dates();
    const auto design =
        build_design_matrix(dates, model.trend.grid, model.seasonalities, model.timescale);
    Eigen::VectorXd params(design.cols());
    params[0] = model.trend.k;
    params[1] = model.trend.m;
    Eigen::Index c = 2;
    for (double d : model.trend.grid.deltas) params[c++] = d;
    for (const auto& block : model.seasonalities) {
        for (double coefficient : block.coefficients) params[c++] = coefficient;
    }
    const Eigen::VectorXd lin = design * params;
    const Forecast fc = predict(model, dates);
    for (std::size_t i = 0; i < dates.size(); ++i) {
        CHECK(lin[static_cast<Eigen::Index>(i)] ==
              doctest::Approx(fc.yhat_log[i]).epsilon(1e-12));
    }
}

TEST_CASE("ridge shrinkage is monotone in lambda_delta") {
    const DailySeries series = noisy_series(31, 250);
    FitConfig cfg;
    cfg.n_changepoints = 8;
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : {0.1, 1.0, 10.0, 100.0}) {
        cfg.lambda_delta = lambda;
        const auto [model, diagnostics] = fit(series, cfg);
        double norm = 0.0;
        for (double d : model.trend.grid.deltas) norm += d * d;
        norm = std::sqrt(norm);
        CHECK(norm <= previous + 1e-12);
        previous = norm;
    }
}

TEST_CASE("fit is deterministic") {
    const DailySeries series = noisy_series(55, 220);
    const auto [a, da] = fit(series);
    const auto [b, db] = fit(series);
    CHECK(a.trend.k == b.trend.k);
    CHECK(a.trend.m == b.trend.m);
    for (std::size_t j = 0; j < a.trend.grid.size(); ++j) {
        CHECK(a.trend.grid.deltas[j] == b.trend.grid.deltas[j]);
    }
    for (std::size_t s = 0; s < a.seasonalities.size(); ++s) {
        for (std::size_t i = 0; i < a.seasonalities[s].coefficients.size(); ++i) {
            CHECK(a.seasonalities[s].coefficients[i] == b.seasonalities[s].coefficients[i]);
        }
    }
}

TEST_CASE("fit matches the brute-force normal-equations oracle") {
    const DailySeries series = noisy_series(91, 180);
    FitConfig cfg;
    cfg.n_changepoints = 4;
    cfg.seasonalities = {{"weekly", 7.0, 2}}; // 2 + 4 + 4 = 10 parameters
    const auto [model, diagnostics] = fit(series, cfg);

    const std::vector<Date> dates = series.observed_dates();
    const auto design =
        build_design_matrix(dates, model.trend.grid, model.seasonalities, model.timescale);
    oracle::Matrix rows(dates.size(), std::vector<double>(static_cast<std::size_t>(design.cols())));
    std::vector<double> response(dates.size());
    for (std::size_t r = 0; r < dates.size(); ++r) {
        response[r] = *series.at(dates[r]);
        for (Eigen::Index c = 0; c < design.cols(); ++c) {
            rows[r][static_cast<std::size_t>(c)] = design(static_cast<Eigen::Index>(r), c);
        }
    }
    std::vector<double> weights(static_cast<std::size_t>(design.cols()), cfg.lambda_season);
    weights[0] = weights[1] = 0.0;
    for (std::size_t j = 0; j < 4; ++j) weights[2 + j] = cfg.lambda_delta;
    const std::vector<double> anchor(static_cast<std::size_t>(design.cols()), 0.0);
    const auto expected = oracle::ridge_solve(rows, response, weights, anchor);

    CHECK(model.trend.k == doctest::Approx(expected[0]).epsilon(1e-8));
    CHECK(model.trend.m == doctest::Approx(expected[1]).epsilon(1e-8));
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(model.trend.grid.deltas[j] == doctest::Approx(expected[2 + j]).epsilon(1e-8));
    }
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(model.seasonalities[0].coefficients[i] ==
              doctest::Approx(expected[6 + i]).epsilon(1e-8));
    }
}

TEST_CASE("fit rejects bad inputs") {
    DailySeries few = line_series(1.0, 0.0, 10);
    CHECK_THROWS_AS(fit(few), DataError);

    DailySeries raw = line_series(1.0, 0.0, 100);
    raw.log_space = false;
    CHECK_THROWS_AS(fit(raw), DataError);

    FitConfig bad;
    bad.changepoint_range = 0.0;
    CHECK_THROWS_AS(fit(line_series(1.0, 0.0, 100), bad), ConfigError);
}

TEST_CASE("split_train_test follows the scenario windows") {
    DailySeries series;
    series.entity_id = "b";
    series.start = Date::from_ymd(2013, 1, 1);
    series.values.assign(static_cast<std::size_t>(Date::from_ymd(2017, 12, 31) -
                                                  series.start) + 1,
                         1.0);

    SUBCASE("scenario 1a trains on the single prior year") {
        ScenarioConfig sc;
        sc.id = ScenarioId::s1a;
        const auto split = split_train_test(series, sc);
        CHECK(split.train.start == Date::from_ymd(2016, 1, 1));
        CHECK(split.train.end_date() == Date::from_ymd(2016, 12, 31));
        CHECK(split.test.start == Date::from_ymd(2017, 1, 1));
        CHECK(split.test.end_date() == Date::from_ymd(2017, 12, 31));
        CHECK_FALSE(split.adapt.has_value());
    }

    SUBCASE("scenario 1b trains on all history") {
        ScenarioConfig sc;
        sc.id = ScenarioId::s1b;
        const auto split = split_train_test(series, sc);
        CHECK(split.train.start == series.start);
        CHECK(split.train.end_date() == Date::from_ymd(2016, 12, 31));
        CHECK(split.test.start == Date::from_ymd(2017, 1, 1));
    }

    SUBCASE("scenario 3 leaves the year before the test for adaptation") {
        ScenarioConfig sc;
        sc.id = ScenarioId::s3;
        const auto split = split_train_test(series, sc);
        CHECK(split.train.end_date() == Date::from_ymd(2015, 12, 31));
        REQUIRE(split.adapt.has_value());
        CHECK(split.adapt->start == Date::from_ymd(2016, 1, 1));
        CHECK(split.adapt->end_date() == Date::from_ymd(2016, 12, 31));
        CHECK(split.test.start == Date::from_ymd(2017, 1, 1));
    }

    SUBCASE("windows are disjoint and contiguous") {
        ScenarioConfig sc;
        sc.id = ScenarioId::s3;
        const auto split = split_train_test(series, sc);
        CHECK(split.train.end_date() + 1 == split.adapt->start);
        CHECK(split.adapt->end_date() + 1 == split.test.start);
    }

    SUBCASE("the horizon truncates the test window") {
        ScenarioConfig sc;
        sc.id = ScenarioId::s1a;
        sc.horizon_months = 6;
        const auto split = split_train_test(series, sc);
        CHECK(split.test.end_date() == Date::from_ymd(2017, 6, 30));
    }

    SUBCASE("missing coverage names the gap") {
        DailySeries late = series;
        late.start = Date::from_ymd(2016, 6, 1);
        late.values.resize(static_cast<std::size_t>(Date::from_ymd(2017, 12, 31) - late.start) + 1);
        ScenarioConfig sc;
        sc.id = ScenarioId::s1a;
        try {
            split_train_test(late, sc);
            FAIL("expected ScenarioError");
        } catch (const ScenarioError& e) {
            CHECK(std::string(e.what()).find("training") != std::string::npos);
        }
    }
}

TEST_CASE("fit gradient also matches central finite differences") {
    const DailySeries series = noisy_series(17, 200);
    FitConfig cfg;
    cfg.n_changepoints = 3;
    cfg.seasonalities = {{"weekly", 7.0, 2}};
    const auto [model, diagnostics] = fit(series, cfg);

    const std::vector<Date> dates = series.observed_dates();
    const auto design =
        build_design_matrix(dates, model.trend.grid, model.seasonalities, model.timescale);
    Eigen::VectorXd response(static_cast<Eigen::Index>(dates.size()));
    for (std::size_t i = 0; i < dates.size(); ++i) {
        response[static_cast<Eigen::Index>(i)] = *series.at(dates[i]);
    }
    Eigen::VectorXd weights = Eigen::VectorXd::Zero(design.cols());
    for (Eigen::Index j = 2; j < 5; ++j) weights[j] = cfg.lambda_delta;
    for (Eigen::Index j = 5; j < design.cols(); ++j) weights[j] = cfg.lambda_season;

    Eigen::VectorXd theta(design.cols());
    theta[0] = model.trend.k;
    theta[1] = model.trend.m;
    for (std::size_t j = 0; j < 3; ++j) {
        theta[static_cast<Eigen::Index>(2 + j)] = model.trend.grid.deltas[j];
    }
    for (std::size_t i = 0; i < model.seasonalities[0].coefficients.size(); ++i) {
        theta[static_cast<Eigen::Index>(5 + i)] = model.seasonalities[0].coefficients[i];
    }

    auto objective = [&](const Eigen::VectorXd& p) {
        return (design * p - response).squaredNorm() + p.cwiseProduct(weights).dot(p);
    };
    const double obj = objective(theta);
    const double step = 1e-6;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        Eigen::VectorXd plus = theta, minus = theta;
        plus[i] += step;
        minus[i] -= step;
        const double fd = (objective(plus) - objective(minus)) / (2 * step);
        CHECK(std::abs(fd) <= 1e-4 * (1.0 + std::abs(obj)));
    }
}
