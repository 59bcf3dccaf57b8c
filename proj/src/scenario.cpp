#include "salescast/scenario.hpp"

#include "salescast/errors.hpp"

namespace salescast {

std::string to_string(ScenarioId id) {
    switch (id) {
    case ScenarioId::s1a: return "1a";
    case ScenarioId::s1b: return "1b";
    case ScenarioId::s2: return "2";
    case ScenarioId::s3: return "3";
    }
    return "?";
}

ScenarioId scenario_from_string(const std::string& s) {
    if (s == "1a") return ScenarioId::s1a;
    if (s == "1b") return ScenarioId::s1b;
    if (s == "2") return ScenarioId::s2;
    if (s == "3") return ScenarioId::s3;
    throw ConfigError("unknown scenario `" + s + "` (expected 1a, 1b, 2 or 3)");
}

void ScenarioConfig::validate() const {
    if (horizon_months != 1 && horizon_months != 6 && horizon_months != 12) {
        throw ConfigError("horizon_months must be 1, 6 or 12");
    }
    if (train_end_year && *train_end_year >= test_year) {
        throw ConfigError("train_end_year must precede test_year");
    }
}

Date ScenarioConfig::train_end() const {
    const int default_year = id == ScenarioId::s3 ? test_year - 2 : test_year - 1;
    return Date::from_ymd(train_end_year.value_or(default_year), 12, 31);
}

DateRange ScenarioConfig::train_window_fixed() const {
    const int year = train_end_year.value_or(test_year - 1);
    return {Date::from_ymd(year, 1, 1), Date::from_ymd(year, 12, 31)};
}

DateRange ScenarioConfig::adapt_window() const {
    return {Date::from_ymd(test_year - 1, 1, 1), Date::from_ymd(test_year - 1, 12, 31)};
}

DateRange ScenarioConfig::test_window() const {
    return {Date::from_ymd(test_year, 1, 1), month_end(test_year, horizon_months)};
}

} // namespace salescast
