#pragma once

#include "salescast/date.hpp"
#include "salescast/series.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace salescast {

struct RegimeBreak {
    Date date;
    double new_growth_per_year; // replaces the growth rate from this date on
};

/**
 * Generative description of one synthetic branch:
 *
 *   value(d) = base_level * growth(d) * weekly[dow(d)]
 *            * (1 + yearly_amplitude * cos(2 pi (day(d) - phase) / 365.25))
 *            * exp(N(0, sigma^2))
 *
 * growth compounds at growth_per_year, switching rate at each regime break,
 * so the log2 skeleton is a piecewise-linear trend plus periodic terms. The
 * yearly term runs on a continuous day counter anchored to the span start's
 * day-of-year, keeping the noiseless series inside the model class.
 */
struct BranchSpec {
    std::string entity_id;
    double base_level = 1000.0;
    double growth_per_year = 0.0;           // fractional, e.g. 0.05
    std::array<double, 7> weekly_pattern{1, 1, 1, 1, 1, 1, 1}; // index 0 = Monday
    double yearly_amplitude = 0.0;          // fraction of the level
    double yearly_phase_days = 0.0;         // day-of-year of the yearly peak
    std::vector<RegimeBreak> regime_breaks; // sorted by date
    double noise_sigma = 0.0;               // log-normal sigma
    std::optional<int> closed_weekday;      // 0 = Monday; produces gap days
    DateRange span{};
    std::uint64_t seed = 0;

    void validate() const;
};

/// Branches of one chain share the chain's seasonal shape up to small
/// authored perturbations.
struct ChainPreset {
    std::string label;
    std::array<double, 7> weekly_pattern;
    double yearly_amplitude = 0.0;
    double yearly_phase_days = 0.0;
};

/// Deterministic in the seed; distinct seeds change only the noise.
DailySeries generate_branch(const BranchSpec& spec);

/// Two chains, three branches each: 72/60/48/60/60/60 months of history,
/// all ending 2017-12-31, with distinct weekly shapes per chain.
std::vector<BranchSpec> six_branch_specs(std::uint64_t seed);
std::map<std::string, DailySeries> six_branch_preset(std::uint64_t seed);

/// Reproducibility manifest: the full spec list as JSON.
std::string specs_to_json(const std::vector<BranchSpec>& specs);

} // namespace salescast
