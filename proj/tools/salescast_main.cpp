#include "salescast/config_io.hpp"
#include "salescast/errors.hpp"
#include "salescast/evaluation.hpp"
#include "salescast/fitting.hpp"
#include "salescast/model_io.hpp"
#include "salescast/pipeline.hpp"
#include "salescast/synthetic.hpp"
#include "salescast/transfer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace salescast;

namespace {

constexpr const char* kToolVersion = "salescast 0.1.0";

std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string hex_digest(std::string_view data) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(data)));
    return buf;
}

// Outputs land under a temp name first so partial runs never leave a
// truncated artifact behind.
void atomic_write(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw FormatError("cannot write " + path.string());
        out << content;
    }
    fs::rename(tmp, path);
}

/// Collects inputs/outputs along a command and drops one manifest JSON.
class ManifestBuilder {
public:
    explicit ManifestBuilder(std::string command)
        : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

    void add_input(const std::string& path, const std::string& content) {
        inputs_.emplace_back(path, hex_digest(content));
    }
    void add_config(const std::string& content) { config_text_ += content; }
    void add_output(const fs::path& path) { outputs_.push_back(path.string()); }

    void write(const fs::path& manifest_path) {
        nlohmann::json j;
        j["command"] = command_;
        j["config_hash"] = config_text_.empty() ? "-" : hex_digest(config_text_);
        nlohmann::json inputs = nlohmann::json::object();
        for (const auto& [path, digest] : inputs_) inputs[path] = digest;
        j["inputs"] = std::move(inputs);
        j["outputs"] = outputs_;
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
        j["elapsed_seconds"] = elapsed.count();
        j["tool_version"] = kToolVersion;
        atomic_write(manifest_path, j.dump(2) + "\n");
    }

private:
    std::string command_;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::vector<std::string> outputs_;
    std::string config_text_;
    std::chrono::steady_clock::time_point start_;
};

double eps_log_from_config_text(const std::string& text) {
    if (text.empty()) return 0.0;
    const auto j = nlohmann::json::parse(text);
    return j.value("eps_log", 0.0);
}

DailySeries load_observation_series(const std::string& path, const std::string& entity) {
    DailySeries series = load_series_csv(path, entity);
    if (series.empty()) throw DataError("series file " + path + " holds no rows");
    return series;
}

void cmd_ingest(const std::string& input_path, const std::string& config_path,
                const std::string& entity, const std::string& out_path,
                std::string report_path) {
    ManifestBuilder manifest("ingest");
    const std::string input_text = read_text_file(input_path);
    manifest.add_input(input_path, input_text);
    CleaningConfig cfg;
    if (!config_path.empty()) {
        const std::string cfg_text = read_text_file(config_path);
        manifest.add_config(cfg_text);
        cfg = cleaning_config_from_json(cfg_text);
    }
    std::istringstream in(input_text);
    auto parsed = parse_transactions(in);
    auto [records, report] = clean_transactions(std::move(parsed.records), cfg);
    const std::string id = entity.empty() ? fs::path(out_path).stem().string() : entity;
    const DailySeries series = aggregate_daily(records, cfg, &report, id);

    std::ostringstream csv;
    write_series_csv(series, csv);
    atomic_write(out_path, csv.str());
    manifest.add_output(out_path);
    if (report_path.empty()) report_path = out_path + ".report.json";
    atomic_write(report_path, to_json(report));
    manifest.add_output(report_path);
    manifest.write(out_path + ".manifest.json");
}

void cmd_fit(const std::string& series_path, const std::string& config_path,
             const std::string& entity, const std::string& out_path,
             std::string diagnostics_path) {
    ManifestBuilder manifest("fit");
    const std::string series_text = read_text_file(series_path);
    manifest.add_input(series_path, series_text);
    FitConfig cfg;
    double eps_log = 0.0;
    if (!config_path.empty()) {
        const std::string cfg_text = read_text_file(config_path);
        manifest.add_config(cfg_text);
        cfg = fit_config_from_json(cfg_text);
        eps_log = eps_log_from_config_text(cfg_text);
    }
    std::istringstream in(series_text);
    DailySeries series = read_series_csv(in, entity.empty() ? fs::path(series_path).stem().string()
                                                            : entity);
    if (eps_log == 0.0) series = zeros_to_gaps(std::move(series));
    const auto [model, diagnostics] = fit(log2_transform(series, eps_log), cfg);

    atomic_write(out_path, model_to_json(model));
    manifest.add_output(out_path);
    if (diagnostics_path.empty()) diagnostics_path = out_path + ".diagnostics.json";
    atomic_write(diagnostics_path, to_json(diagnostics));
    manifest.add_output(diagnostics_path);
    manifest.write(out_path + ".manifest.json");
}

DateRange parse_cli_range(const std::string& from, const std::string& to) {
    const auto start = Date::parse(from);
    const auto end = Date::parse(to);
    if (!start || !end) throw ConfigError("dates must be ISO YYYY-MM-DD");
    if (*end < *start) throw ConfigError("empty date range: --to precedes --from");
    return {*start, *end};
}

void cmd_forecast(const std::string& model_path, const std::string& from, const std::string& to,
                  const std::string& out_path) {
    ManifestBuilder manifest("forecast");
    const std::string model_text = read_text_file(model_path);
    manifest.add_input(model_path, model_text);
    const AdditiveModel model = model_from_json(model_text);
    const auto dates = date_range_days(parse_cli_range(from, to));
    const Forecast fc = predict(model, dates);
    std::ostringstream csv;
    write_forecast_csv(fc, csv);
    atomic_write(out_path, csv.str());
    manifest.add_output(out_path);
    manifest.write(out_path + ".manifest.json");
}

void cmd_transfer(const std::string& source_path, const std::string& mode,
                  const std::string& target_entity, const std::string& adapt_series_path,
                  const std::string& adapt_config_path, const std::string& from,
                  const std::string& to, const std::string& out_path,
                  const std::string& weights_path) {
    ManifestBuilder manifest("transfer");
    const std::string source_text = read_text_file(source_path);
    manifest.add_input(source_path, source_text);
    const AdditiveModel source = model_from_json(source_text);

    AdditiveModel result_model;
    if (mode == "zero-shot") {
        if (!from.empty() || !to.empty()) {
            // Forecast CSV for the target dates; the source stays untouched.
            const auto dates = date_range_days(parse_cli_range(from, to));
            const Forecast fc = zero_shot_forecast(source, dates);
            std::ostringstream csv;
            write_forecast_csv(fc, csv);
            atomic_write(out_path, csv.str());
            manifest.add_output(out_path);
            manifest.write(out_path + ".manifest.json");
            return;
        }
        if (target_entity.empty()) {
            throw ConfigError("zero-shot transfer needs --target-entity (or --from/--to for a forecast)");
        }
        result_model = transferred_copy(source, target_entity);
    } else {
        if (adapt_series_path.empty()) throw ConfigError("adapt mode needs --adapt-series");
        const std::string series_text = read_text_file(adapt_series_path);
        manifest.add_input(adapt_series_path, series_text);
        AdaptConfig cfg;
        double eps_log = 0.0;
        if (!adapt_config_path.empty()) {
            const std::string cfg_text = read_text_file(adapt_config_path);
            manifest.add_config(cfg_text);
            cfg = adapt_config_from_json(cfg_text);
            eps_log = eps_log_from_config_text(cfg_text);
        }
        std::istringstream in(series_text);
        DailySeries series =
            read_series_csv(in, target_entity.empty()
                                    ? fs::path(adapt_series_path).stem().string()
                                    : target_entity);
        if (eps_log == 0.0) series = zeros_to_gaps(std::move(series));
        result_model = adapt(source, log2_transform(series, eps_log), cfg).first;
    }

    atomic_write(out_path, model_to_json(result_model));
    manifest.add_output(out_path);
    if (!weights_path.empty()) {
        const auto profile = changepoint_weight_profile(result_model);
        std::ostringstream csv;
        write_weight_profile_csv(profile, csv);
        atomic_write(weights_path, csv.str());
        manifest.add_output(weights_path);
    }
    manifest.write(out_path + ".manifest.json");
}

std::map<std::string, DailySeries> load_data_dir(const std::string& dir,
                                                 ManifestBuilder& manifest) {
    std::map<std::string, DailySeries> entities;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        const std::string text = read_text_file(file.string());
        manifest.add_input(file.string(), text);
        std::istringstream in(text);
        entities.emplace(file.stem().string(), read_series_csv(in, file.stem().string()));
    }
    if (entities.empty()) throw DataError("no .csv series found in " + dir);
    return entities;
}

void cmd_scenario(const std::string& scenario_name, const std::string& data_dir,
                  std::optional<std::uint64_t> synthetic_seed, const std::string& fit_config_path,
                  const std::string& adapt_config_path, int horizon, int test_year,
                  std::optional<int> train_end_year, const std::string& out_dir) {
    ManifestBuilder manifest("scenario " + scenario_name);
    ScenarioConfig scenario;
    scenario.id = scenario_from_string(scenario_name);
    scenario.horizon_months = horizon;
    scenario.test_year = test_year;
    scenario.train_end_year = train_end_year;

    FitConfig fit_cfg;
    if (!fit_config_path.empty()) {
        const std::string text = read_text_file(fit_config_path);
        manifest.add_config(text);
        fit_cfg = fit_config_from_json(text);
    }
    AdaptConfig adapt_cfg;
    if (!adapt_config_path.empty()) {
        const std::string text = read_text_file(adapt_config_path);
        manifest.add_config(text);
        adapt_cfg = adapt_config_from_json(text);
    }

    std::map<std::string, DailySeries> entities;
    if (synthetic_seed) {
        entities = six_branch_preset(*synthetic_seed);
    } else {
        entities = load_data_dir(data_dir, manifest);
    }

    const ScenarioResult result = run_scenario(entities, scenario, fit_cfg, adapt_cfg);

    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    {
        std::ostringstream json;
        write_report_json(result, json);
        atomic_write(out / "report.json", json.str());
        manifest.add_output(out / "report.json");
    }
    if (result.matrix && result.matrix_summary) {
        std::ostringstream csv;
        write_matrix_csv(*result.matrix, *result.matrix_summary, csv);
        atomic_write(out / "matrix.csv", csv.str());
        manifest.add_output(out / "matrix.csv");
    }
    for (const auto& [entity, model] : result.models) {
        const DateRange window{model.training_window.start, scenario.test_window().end};
        const auto decomposition = components(model, date_range_days(window));
        std::ostringstream csv;
        write_components_csv(decomposition, csv);
        const fs::path path = out / ("components_" + entity + ".csv");
        atomic_write(path, csv.str());
        manifest.add_output(path);
    }
    int n_feasible = 0;
    for (const auto& [entity, report] : result.reports) {
        if (report.feasible) ++n_feasible;
    }
    std::cout << "scenario " << scenario_name << ": " << n_feasible << "/"
              << result.reports.size() << " entities evaluated, outputs in " << out_dir << "\n";
    manifest.write(out / "manifest.json");
}

void cmd_synth(std::uint64_t seed, const std::string& out_dir) {
    ManifestBuilder manifest("synth");
    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    const auto specs = six_branch_specs(seed);
    for (const auto& spec : specs) {
        const DailySeries series = generate_branch(spec);
        std::ostringstream csv;
        write_series_csv(series, csv);
        const fs::path path = out / (spec.entity_id + ".csv");
        atomic_write(path, csv.str());
        manifest.add_output(path);
    }
    atomic_write(out / "branches.json", specs_to_json(specs));
    manifest.add_output(out / "branches.json");
    manifest.write(out / "manifest.json");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Additive-regression sales forecasting with transfer learning"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Clean transactions and aggregate daily net sales");
    std::string in_input, in_cfg, in_entity, in_out, in_report;
    ingest->add_option("--input", in_input, "Transaction CSV")->required();
    ingest->add_option("--cleaning-config", in_cfg, "Cleaning config JSON");
    ingest->add_option("--entity", in_entity, "Entity id for the output series");
    ingest->add_option("--out", in_out, "Daily-series CSV to write")->required();
    ingest->add_option("--report", in_report, "Cleaning report JSON to write");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Fit the additive model to a daily series");
    std::string ft_series, ft_cfg, ft_entity, ft_out, ft_diag;
    fit_cmd->add_option("--series", ft_series, "Daily-series CSV")->required();
    fit_cmd->add_option("--fit-config", ft_cfg, "Fit config JSON");
    fit_cmd->add_option("--entity", ft_entity, "Entity id override");
    fit_cmd->add_option("--out", ft_out, "Model JSON to write")->required();
    fit_cmd->add_option("--diagnostics", ft_diag, "Diagnostics JSON to write");

    // forecast
    auto* forecast_cmd = app.add_subcommand("forecast", "Predict a date range from a model");
    std::string fc_model, fc_from, fc_to, fc_out;
    forecast_cmd->add_option("--model", fc_model, "Model JSON")->required();
    forecast_cmd->add_option("--from", fc_from, "First date (ISO)")->required();
    forecast_cmd->add_option("--to", fc_to, "Last date (ISO)")->required();
    forecast_cmd->add_option("--out", fc_out, "Forecast CSV to write")->required();

    // transfer
    auto* transfer_cmd = app.add_subcommand("transfer", "Transfer a model zero-shot or adapt it");
    std::string tr_source, tr_mode = "zero-shot", tr_target, tr_series, tr_cfg, tr_from, tr_to,
                tr_out, tr_weights;
    transfer_cmd->add_option("--source", tr_source, "Source model JSON")->required();
    transfer_cmd->add_option("--mode", tr_mode, "zero-shot | adapt")
        ->check(CLI::IsMember({"zero-shot", "adapt"}));
    transfer_cmd->add_option("--target-entity", tr_target, "Target entity id");
    transfer_cmd->add_option("--adapt-series", tr_series, "Adaptation window CSV (adapt mode)");
    transfer_cmd->add_option("--adapt-config", tr_cfg, "Adapt config JSON");
    transfer_cmd->add_option("--from", tr_from, "Forecast start (zero-shot forecast output)");
    transfer_cmd->add_option("--to", tr_to, "Forecast end (zero-shot forecast output)");
    transfer_cmd->add_option("--out", tr_out, "Output model JSON or forecast CSV")->required();
    transfer_cmd->add_option("--weights", tr_weights, "Changepoint weight profile CSV");

    // scenario
    auto* scenario_cmd = app.add_subcommand("scenario", "Run an evaluation scenario");
    std::string sc_name, sc_data, sc_fit_cfg, sc_adapt_cfg, sc_out;
    std::optional<std::uint64_t> sc_seed;
    int sc_horizon = 12, sc_test_year = 2017;
    std::optional<int> sc_train_end;
    scenario_cmd->add_option("--scenario", sc_name, "1a | 1b | 2 | 3")
        ->required()
        ->check(CLI::IsMember({"1a", "1b", "2", "3"}));
    scenario_cmd->add_option("--data", sc_data, "Directory of <entity>.csv series");
    scenario_cmd->add_option("--synthetic", sc_seed, "Generate the six-branch preset with this seed");
    scenario_cmd->add_option("--fit-config", sc_fit_cfg, "Fit config JSON");
    scenario_cmd->add_option("--adapt-config", sc_adapt_cfg, "Adapt config JSON");
    scenario_cmd->add_option("--horizon", sc_horizon, "Test horizon in months")
        ->check(CLI::IsMember({1, 6, 12}));
    scenario_cmd->add_option("--test-year", sc_test_year, "Test calendar year");
    scenario_cmd->add_option("--train-end-year", sc_train_end, "Override the training cutoff year");
    scenario_cmd->add_option("--out", sc_out, "Output directory")->required();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Emit the six-branch synthetic preset");
    std::uint64_t sy_seed = 0;
    std::string sy_out;
    synth_cmd->add_option("--seed", sy_seed, "Preset seed")->required();
    synth_cmd->add_option("--out", sy_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*ingest) {
            cmd_ingest(in_input, in_cfg, in_entity, in_out, in_report);
        } else if (*fit_cmd) {
            cmd_fit(ft_series, ft_cfg, ft_entity, ft_out, ft_diag);
        } else if (*forecast_cmd) {
            cmd_forecast(fc_model, fc_from, fc_to, fc_out);
        } else if (*transfer_cmd) {
            cmd_transfer(tr_source, tr_mode, tr_target, tr_series, tr_cfg, tr_from, tr_to, tr_out,
                         tr_weights);
        } else if (*scenario_cmd) {
            if (sc_data.empty() == !sc_seed.has_value()) {
                std::cerr << "error: give exactly one of --data or --synthetic\n";
                return 2;
            }
            cmd_scenario(sc_name, sc_data, sc_seed, sc_fit_cfg, sc_adapt_cfg, sc_horizon,
                         sc_test_year, sc_train_end, sc_out);
        } else if (*synth_cmd) {
            cmd_synth(sy_seed, sy_out);
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
