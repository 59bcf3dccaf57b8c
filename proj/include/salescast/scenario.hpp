#pragma once

#include "salescast/date.hpp"

#include <optional>
#include <string>

namespace salescast {

/// The four evaluation regimes: isolated one-year fit, isolated all-history
/// fit, zero-shot transfer, and transfer with one-year adaptation.
enum class ScenarioId { s1a, s1b, s2, s3 };

std::string to_string(ScenarioId id);
ScenarioId scenario_from_string(const std::string& s);

/**
 * Declarative train/adapt/test window rules. Defaults follow the standard
 * layout: test on `test_year`, train through the prior year (two years prior
 * for the adapted scenario, leaving the in-between year for adaptation).
 * `train_end_year` overrides the training cutoff, which keeps transfer
 * scenarios comparable on identical source data.
 */
struct ScenarioConfig {
    ScenarioId id = ScenarioId::s1a;
    int test_year = 2017;
    int horizon_months = 12; // 1 | 6 | 12
    std::optional<int> train_end_year;

    void validate() const;

    bool uses_transfer() const { return id == ScenarioId::s2 || id == ScenarioId::s3; }
    bool has_adaptation() const { return id == ScenarioId::s3; }

    /// All-history training cutoff (inclusive).
    Date train_end() const;

    /// Fixed one-year training window (scenario 1a only).
    DateRange train_window_fixed() const;

    /// Calendar-year adaptation window (scenario 3 only).
    DateRange adapt_window() const;

    /// First `horizon_months` months of the test year.
    DateRange test_window() const;
};

} // namespace salescast
