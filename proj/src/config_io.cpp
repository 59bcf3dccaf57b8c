#include "salescast/config_io.hpp"

#include "salescast/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace salescast {

namespace {

nlohmann::json parse_or_throw(std::string_view text, const char* what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string(what) + ": " + e.what());
    }
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

std::string to_json(const FitConfig& cfg) {
    nlohmann::json j;
    j["n_changepoints"] = cfg.n_changepoints;
    j["changepoint_range"] = cfg.changepoint_range;
    j["lambda_delta"] = cfg.lambda_delta;
    j["lambda_season"] = cfg.lambda_season;
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& spec : cfg.seasonalities) {
        blocks.push_back(
            {{"name", spec.name}, {"period_days", spec.period_days}, {"order", spec.order}});
    }
    j["seasonalities"] = std::move(blocks);
    return j.dump(2) + "\n";
}

FitConfig fit_config_from_json(std::string_view text) {
    const nlohmann::json j = parse_or_throw(text, "fit config");
    FitConfig cfg;
    read_field(j, "n_changepoints", cfg.n_changepoints);
    read_field(j, "changepoint_range", cfg.changepoint_range);
    read_field(j, "lambda_delta", cfg.lambda_delta);
    read_field(j, "lambda_season", cfg.lambda_season);
    if (j.contains("seasonalities")) {
        cfg.seasonalities.clear();
        for (const auto& block : j.at("seasonalities")) {
            SeasonalitySpec spec;
            spec.name = block.at("name").get<std::string>();
            read_field(block, "period_days", spec.period_days);
            read_field(block, "order", spec.order);
            cfg.seasonalities.push_back(std::move(spec));
        }
    }
    cfg.validate();
    return cfg;
}

std::string to_json(const AdaptConfig& cfg) {
    nlohmann::json j;
    j["n_new_changepoints"] = cfg.n_new_changepoints;
    j["lambda_anchor"] = cfg.lambda_anchor;
    j["lambda_delta"] = cfg.lambda_delta;
    j["adapt_seasonality"] = cfg.adapt_seasonality;
    j["adapt_level"] = cfg.adapt_level;
    return j.dump(2) + "\n";
}

AdaptConfig adapt_config_from_json(std::string_view text) {
    const nlohmann::json j = parse_or_throw(text, "adapt config");
    AdaptConfig cfg;
    read_field(j, "n_new_changepoints", cfg.n_new_changepoints);
    read_field(j, "lambda_anchor", cfg.lambda_anchor);
    read_field(j, "lambda_delta", cfg.lambda_delta);
    read_field(j, "adapt_seasonality", cfg.adapt_seasonality);
    read_field(j, "adapt_level", cfg.adapt_level);
    cfg.validate();
    return cfg;
}

std::string to_json(const CleaningConfig& cfg) {
    nlohmann::json j;
    j["cutoff_hour"] = cfg.cutoff_hour;
    j["drop_tips"] = cfg.drop_tips;
    j["drop_negative_days"] = cfg.drop_negative_days;
    j["eps_log"] = cfg.eps_log;
    if (cfg.validity_window) {
        j["validity_window"] = {{"start", cfg.validity_window->start.to_string()},
                                {"end", cfg.validity_window->end.to_string()}};
    }
    return j.dump(2) + "\n";
}

CleaningConfig cleaning_config_from_json(std::string_view text) {
    const nlohmann::json j = parse_or_throw(text, "cleaning config");
    CleaningConfig cfg;
    read_field(j, "cutoff_hour", cfg.cutoff_hour);
    read_field(j, "drop_tips", cfg.drop_tips);
    read_field(j, "drop_negative_days", cfg.drop_negative_days);
    read_field(j, "eps_log", cfg.eps_log);
    if (j.contains("validity_window")) {
        const auto& w = j.at("validity_window");
        const auto start = Date::parse(w.at("start").get<std::string>());
        const auto end = Date::parse(w.at("end").get<std::string>());
        if (!start || !end) throw FormatError("cleaning config: invalid validity_window dates");
        cfg.validity_window = DateRange{*start, *end};
    }
    cfg.validate();
    return cfg;
}

std::string to_json(const CleaningReport& report) {
    nlohmann::json j;
    j["n_input"] = report.n_input;
    j["n_retained"] = report.n_retained;
    j["n_dropped_noise"] = report.n_dropped_noise;
    j["n_dropped_tips"] = report.n_dropped_tips;
    j["n_negative_days_removed"] = report.n_negative_days_removed;
    j["fraction_dropped"] = report.fraction_dropped;
    return j.dump(2) + "\n";
}

std::string to_json(const FitDiagnostics& diagnostics) {
    nlohmann::json j;
    j["objective_value"] = diagnostics.objective_value;
    j["gradient_inf_norm"] = diagnostics.gradient_inf_norm;
    j["n_rows"] = diagnostics.n_rows;
    j["condition_estimate"] = diagnostics.condition_estimate;
    j["elapsed_seconds"] = diagnostics.elapsed.count();
    return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace salescast
