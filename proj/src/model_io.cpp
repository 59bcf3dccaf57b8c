#include "salescast/model_io.hpp"

#include "salescast/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace salescast {

namespace {

constexpr int kModelVersion = 1;

Date parse_date_field(const nlohmann::json& j, const char* what) {
    const auto date = Date::parse(j.get<std::string>());
    if (!date) throw FormatError(std::string("model JSON: invalid date in ") + what);
    return *date;
}

DateRange parse_range(const nlohmann::json& j, const char* what) {
    return {parse_date_field(j.at("start"), what), parse_date_field(j.at("end"), what)};
}

} // namespace

std::string model_to_json(const AdditiveModel& model) {
    nlohmann::json j;
    j["version"] = kModelVersion;
    j["entity_id"] = model.entity_id;
    j["t0"] = model.timescale.t0.to_string();
    j["span_days"] = model.timescale.span_days;
    j["k"] = model.trend.k;
    j["m"] = model.trend.m;
    nlohmann::json changepoints = nlohmann::json::array();
    for (std::size_t i = 0; i < model.trend.grid.size(); ++i) {
        changepoints.push_back(
            {{"s", model.trend.grid.locations[i]}, {"delta", model.trend.grid.deltas[i]}});
    }
    j["changepoints"] = std::move(changepoints);
    if (!model.trend.gammas_bound()) j["gammas"] = model.trend.gammas;
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& block : model.seasonalities) {
        blocks.push_back({{"name", block.name},
                          {"period_days", block.period_days},
                          {"order", block.order},
                          {"coefficients", block.coefficients}});
    }
    j["seasonalities"] = std::move(blocks);
    j["log_space"] = model.log_space;
    j["training_window"] = {{"start", model.training_window.start.to_string()},
                            {"end", model.training_window.end.to_string()}};
    nlohmann::json lineage = nlohmann::json::array();
    for (const auto& entry : model.lineage) {
        nlohmann::json e;
        e["event"] = entry.event;
        e["source_entity"] = entry.source_entity;
        if (!entry.target_entity.empty()) e["target_entity"] = entry.target_entity;
        if (entry.window) {
            e["window"] = {{"start", entry.window->start.to_string()},
                           {"end", entry.window->end.to_string()}};
        }
        lineage.push_back(std::move(e));
    }
    j["lineage"] = std::move(lineage);
    return j.dump(2) + "\n";
}

AdditiveModel model_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model JSON parse failure: ") + e.what());
    }
    try {
        if (j.at("version").get<int>() != kModelVersion) {
            throw FormatError("unsupported model version");
        }
        AdditiveModel model;
        model.entity_id = j.at("entity_id").get<std::string>();
        model.timescale.t0 = parse_date_field(j.at("t0"), "t0");
        model.timescale.span_days = j.at("span_days").get<double>();
        model.trend.k = j.at("k").get<double>();
        model.trend.m = j.at("m").get<double>();
        for (const auto& cp : j.at("changepoints")) {
            model.trend.grid.locations.push_back(cp.at("s").get<double>());
            model.trend.grid.deltas.push_back(cp.at("delta").get<double>());
        }
        if (j.contains("gammas")) {
            model.trend.gammas = j.at("gammas").get<std::vector<double>>();
        } else {
            model.trend.bind_gammas();
        }
        for (const auto& block : j.at("seasonalities")) {
            model.seasonalities.push_back({block.at("name").get<std::string>(),
                                           block.at("period_days").get<double>(),
                                           block.at("order").get<int>(),
                                           block.at("coefficients").get<std::vector<double>>()});
        }
        model.log_space = j.at("log_space").get<bool>();
        model.training_window = parse_range(j.at("training_window"), "training_window");
        for (const auto& entry : j.at("lineage")) {
            LineageEntry e;
            e.event = entry.at("event").get<std::string>();
            e.source_entity = entry.at("source_entity").get<std::string>();
            if (entry.contains("target_entity")) {
                e.target_entity = entry.at("target_entity").get<std::string>();
            }
            if (entry.contains("window")) e.window = parse_range(entry.at("window"), "lineage");
            model.lineage.push_back(std::move(e));
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model JSON is missing fields: ") + e.what());
    }
}

void save_model(const AdditiveModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write model file " + path);
    out << model_to_json(model);
}

AdditiveModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open model file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

} // namespace salescast
