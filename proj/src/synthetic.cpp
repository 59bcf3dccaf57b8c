#include "salescast/synthetic.hpp"

#include "salescast/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace salescast {

void BranchSpec::validate() const {
    if (base_level <= 0.0) throw ConfigError("base_level must be positive");
    for (double w : weekly_pattern) {
        if (w <= 0.0) throw ConfigError("weekly multipliers must be positive");
    }
    if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
    if (closed_weekday && (*closed_weekday < 0 || *closed_weekday > 6)) {
        throw ConfigError("closed_weekday must be in 0..6");
    }
    if (span.end - span.start + 1 < 2 * 365) throw ConfigError("span must cover at least 2 years");
    for (std::size_t i = 1; i < regime_breaks.size(); ++i) {
        if (regime_breaks[i].date <= regime_breaks[i - 1].date) {
            throw ConfigError("regime breaks must be sorted by date");
        }
    }
}

namespace {

constexpr double kDaysPerYear = 365.25;

// Compounded growth multiplier with piecewise rates.
double growth_multiplier(const BranchSpec& spec, Date d) {
    double log_mult = 0.0;
    Date segment_start = spec.span.start;
    double rate = spec.growth_per_year;
    for (const auto& rb : spec.regime_breaks) {
        if (rb.date > d) break;
        log_mult += (rb.date - segment_start) / kDaysPerYear * std::log1p(rate);
        segment_start = rb.date;
        rate = rb.new_growth_per_year;
    }
    log_mult += (d - segment_start) / kDaysPerYear * std::log1p(rate);
    return std::exp(log_mult);
}

} // namespace

DailySeries generate_branch(const BranchSpec& spec) {
    spec.validate();
    DailySeries series;
    series.entity_id = spec.entity_id;
    series.start = spec.span.start;
    series.values.assign(static_cast<std::size_t>(spec.span.n_days()), kGap);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);

    // Continuous day counter anchored to the first day's day-of-year.
    const double doy0 = spec.span.start.day_of_year();
    for (int i = 0; i < spec.span.n_days(); ++i) {
        const double eps = spec.noise_sigma > 0.0 ? noise(rng) : 0.0;
        const Date d = spec.span.start + i;
        if (spec.closed_weekday && d.weekday() == *spec.closed_weekday) continue;
        const double yearly =
            1.0 + spec.yearly_amplitude *
                      std::cos(2.0 * std::numbers::pi * (doy0 + i - spec.yearly_phase_days) /
                               kDaysPerYear);
        double value = spec.base_level * growth_multiplier(spec, d) *
                       spec.weekly_pattern[static_cast<std::size_t>(d.weekday())] * yearly;
        value *= std::exp(eps);
        series.values[static_cast<std::size_t>(i)] = value;
    }
    return series;
}

namespace {

// Chain alpha peaks Friday/Saturday with a weak Sunday; chain beta peaks
// Friday/Sunday with a Saturday dip.
const ChainPreset kChainAlpha{"alpha", {0.90, 0.85, 0.95, 1.05, 1.35, 1.45, 0.60}, 0.18, 200.0};
const ChainPreset kChainBeta{"beta", {0.95, 0.90, 0.95, 1.00, 1.30, 0.75, 1.40}, 0.12, 180.0};

std::array<double, 7> perturb(const std::array<double, 7>& pattern,
                              const std::array<double, 7>& tweak) {
    std::array<double, 7> out{};
    for (std::size_t i = 0; i < 7; ++i) out[i] = pattern[i] * tweak[i];
    return out;
}

std::uint64_t branch_seed(std::uint64_t seed, std::uint64_t index) {
    return seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
}

} // namespace

std::vector<BranchSpec> six_branch_specs(std::uint64_t seed) {
    const Date end = Date::from_ymd(2017, 12, 31);
    std::vector<BranchSpec> specs(6);

    specs[0].entity_id = "b1";
    specs[0].base_level = 5200.0;
    specs[0].growth_per_year = 0.04;
    specs[0].weekly_pattern = kChainAlpha.weekly_pattern;
    specs[0].yearly_amplitude = kChainAlpha.yearly_amplitude;
    specs[0].yearly_phase_days = kChainAlpha.yearly_phase_days;
    specs[0].regime_breaks = {{Date::from_ymd(2015, 7, 1), 0.015}};
    specs[0].span = {Date::from_ymd(2012, 1, 1), end};

    specs[1].entity_id = "b2";
    specs[1].base_level = 3800.0;
    specs[1].growth_per_year = 0.03;
    specs[1].weekly_pattern =
        perturb(kChainAlpha.weekly_pattern, {1.02, 0.98, 1.00, 1.03, 0.97, 1.02, 0.95});
    specs[1].yearly_amplitude = 0.16;
    specs[1].yearly_phase_days = 207.0;
    specs[1].span = {Date::from_ymd(2013, 1, 1), end};

    specs[2].entity_id = "b3";
    specs[2].base_level = 2600.0;
    specs[2].growth_per_year = 0.06;
    specs[2].weekly_pattern =
        perturb(kChainAlpha.weekly_pattern, {0.97, 1.03, 0.99, 0.98, 1.04, 0.98, 1.05});
    specs[2].yearly_amplitude = 0.20;
    specs[2].yearly_phase_days = 193.0;
    specs[2].closed_weekday = 0; // closed Mondays
    specs[2].span = {Date::from_ymd(2014, 1, 1), end};

    specs[3].entity_id = "b4";
    specs[3].base_level = 4500.0;
    specs[3].growth_per_year = 0.02;
    specs[3].weekly_pattern = kChainBeta.weekly_pattern;
    specs[3].yearly_amplitude = kChainBeta.yearly_amplitude;
    specs[3].yearly_phase_days = kChainBeta.yearly_phase_days;
    specs[3].span = {Date::from_ymd(2013, 1, 1), end};

    specs[4].entity_id = "b5";
    specs[4].base_level = 3000.0;
    specs[4].growth_per_year = 0.05;
    specs[4].weekly_pattern =
        perturb(kChainBeta.weekly_pattern, {1.03, 0.97, 1.02, 0.98, 1.03, 0.96, 1.02});
    specs[4].yearly_amplitude = 0.10;
    specs[4].yearly_phase_days = 172.0;
    specs[4].regime_breaks = {{Date::from_ymd(2016, 3, 1), -0.01}};
    specs[4].span = {Date::from_ymd(2013, 1, 1), end};

    specs[5].entity_id = "b6";
    specs[5].base_level = 3500.0;
    specs[5].growth_per_year = 0.03;
    specs[5].weekly_pattern =
        perturb(kChainBeta.weekly_pattern, {0.98, 1.02, 0.97, 1.03, 0.98, 1.05, 0.97});
    specs[5].yearly_amplitude = 0.13;
    specs[5].yearly_phase_days = 188.0;
    specs[5].span = {Date::from_ymd(2013, 1, 1), end};

    for (std::size_t i = 0; i < specs.size(); ++i) {
        specs[i].noise_sigma = 0.08;
        specs[i].seed = branch_seed(seed, i);
    }
    return specs;
}

std::map<std::string, DailySeries> six_branch_preset(std::uint64_t seed) {
    std::map<std::string, DailySeries> out;
    for (const auto& spec : six_branch_specs(seed)) {
        out.emplace(spec.entity_id, generate_branch(spec));
    }
    return out;
}

std::string specs_to_json(const std::vector<BranchSpec>& specs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& spec : specs) {
        nlohmann::json j;
        j["entity_id"] = spec.entity_id;
        j["base_level"] = spec.base_level;
        j["growth_per_year"] = spec.growth_per_year;
        j["weekly_pattern"] = spec.weekly_pattern;
        j["yearly_amplitude"] = spec.yearly_amplitude;
        j["yearly_phase_days"] = spec.yearly_phase_days;
        nlohmann::json breaks = nlohmann::json::array();
        for (const auto& rb : spec.regime_breaks) {
            breaks.push_back({{"date", rb.date.to_string()},
                              {"new_growth_per_year", rb.new_growth_per_year}});
        }
        j["regime_breaks"] = std::move(breaks);
        j["noise_sigma"] = spec.noise_sigma;
        if (spec.closed_weekday) j["closed_weekday"] = *spec.closed_weekday;
        j["span"] = {{"start", spec.span.start.to_string()}, {"end", spec.span.end.to_string()}};
        j["seed"] = spec.seed;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

} // namespace salescast
