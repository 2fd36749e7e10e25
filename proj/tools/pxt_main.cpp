// pxt command line: parses flags into an engine configuration and drives the
// pipeline through the shared-library C interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pxt.h"

namespace {

using nlohmann::json;

struct CliOptions {
    std::string config_path;
    std::optional<std::string> bars, bars_frequency, frequency, daily_bars, predictors, sentiment;
    std::optional<std::string> convention, leverage, output_dir;
    std::optional<std::string> lags, splits;
    std::optional<int> q_max, sims;
    std::optional<double> gamma, weight_min, weight_max;
    std::optional<long> variance_window;
    std::optional<unsigned long long> seed;
    std::optional<bool> filtered;
    std::optional<bool> aim_constant_variance;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// flags override the config file
std::string merged_config(const CliOptions& o) {
    json cfg = json::object();
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) {
            std::cerr << "pxt: cannot open config file '" << o.config_path << "'\n";
            std::exit(3);
        }
        try {
            in >> cfg;
        } catch (const json::exception& e) {
            std::cerr << "pxt: config file is not valid JSON: " << e.what() << "\n";
            std::exit(3);
        }
    }
    if (o.bars) cfg["bars"] = *o.bars;
    if (o.bars_frequency) cfg["bars_frequency"] = *o.bars_frequency;
    if (o.frequency) cfg["frequency"] = *o.frequency;
    if (o.daily_bars) cfg["daily_bars"] = *o.daily_bars;
    if (o.predictors) cfg["predictors"] = *o.predictors;
    if (o.sentiment) cfg["sentiment"] = *o.sentiment;
    if (o.convention) cfg["convention"] = *o.convention;
    if (o.leverage) cfg["leverage"] = *o.leverage;
    if (o.output_dir) cfg["output_dir"] = *o.output_dir;
    if (o.lags) {
        std::vector<size_t> lags;
        for (const auto& s : split_list(*o.lags)) lags.push_back(std::stoul(s));
        cfg["granger_lags"] = lags;
    }
    if (o.splits) cfg["oos_splits"] = split_list(*o.splits);
    if (o.q_max) cfg["q_max"] = *o.q_max;
    if (o.sims) cfg["sims"] = *o.sims;
    if (o.gamma) cfg["gamma"] = *o.gamma;
    if (o.weight_min) cfg["weight_min"] = *o.weight_min;
    if (o.weight_max) cfg["weight_max"] = *o.weight_max;
    if (o.variance_window) cfg["variance_window"] = *o.variance_window;
    if (o.seed) cfg["seed"] = *o.seed;
    if (o.filtered) cfg["granger_filtered"] = *o.filtered;
    if (o.aim_constant_variance) cfg["aim_constant_variance"] = *o.aim_constant_variance;
    return cfg.dump();
}

int run(const std::string& subcommand, const std::string& argument, const CliOptions& o) {
    std::string cfg = merged_config(o);
    pxt_engine* engine = nullptr;
    pxt_status st = pxt_engine_create(cfg.c_str(), &engine);
    if (st != PXT_OK) {
        std::cerr << "pxt: " << pxt_last_error() << "\n";
        return static_cast<int>(st);
    }
    st = pxt_engine_run(engine, subcommand.c_str(), argument.c_str());
    if (st != PXT_OK) {
        std::cerr << "pxt: " << pxt_last_error() << "\n";
        pxt_engine_free(engine);
        return static_cast<int>(st);
    }
    try {
        json summary = json::parse(pxt_engine_summary(engine));
        for (const auto& f : summary["files"]) std::cout << "wrote " << f.get<std::string>() << "\n";
        for (const auto& n : summary["notes"]) std::cout << "note: " << n.get<std::string>() << "\n";
    } catch (const json::exception&) {
        std::cout << pxt_engine_summary(engine) << "\n";
    }
    pxt_engine_free(engine);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pxt - return decomposition and forecasting with price extremes"};
    app.set_version_flag("--version", std::string(pxt_version()));
    app.require_subcommand(1);

    CliOptions o;
    std::string simulate_task;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config_path, "JSON configuration file (flags override)");
        cmd->add_option("--bars", o.bars, "OHLC csv (date,open,high,low,close)");
        cmd->add_option("--bars-frequency", o.bars_frequency, "frequency of the bars file");
        cmd->add_option("--frequency", o.frequency, "analysis frequency: daily|monthly|quarterly");
        cmd->add_option("--daily-bars", o.daily_bars, "daily OHLC csv for indicators");
        cmd->add_option("--predictors", o.predictors, "wide predictor csv (date + columns)");
        cmd->add_option("--sentiment", o.sentiment, "sentiment csv (date + columns)");
        cmd->add_option("--convention", o.convention, "high|low extreme decomposition");
        cmd->add_option("--lags", o.lags, "comma-separated Granger lags (default 2,4,6)");
        cmd->add_option("--splits", o.splits, "comma-separated OOS start dates");
        cmd->add_option("--q-max", o.q_max, "largest VAR order considered");
        cmd->add_option("--gamma", o.gamma, "risk aversion (default 3)");
        cmd->add_option("--weight-min", o.weight_min, "lower portfolio weight bound");
        cmd->add_option("--weight-max", o.weight_max, "upper portfolio weight bound");
        cmd->add_option("--variance-window", o.variance_window, "rolling variance window");
        cmd->add_option("--leverage", o.leverage, "squared_shock|as_written");
        cmd->add_option("--seed", o.seed, "random seed for simulate");
        cmd->add_option("--sims", o.sims, "simulation count");
        cmd->add_option("--out", o.output_dir, "output directory (default $PXT_OUTPUT_DIR or .)");
        cmd->add_flag("--filtered,!--no-filtered", o.filtered,
                      "include filtered series in Granger tests");
        cmd->add_flag("--aim-constant-variance,!--no-aim-constant-variance",
                      o.aim_constant_variance, "constant-variance benchmark model");
        return cmd;
    };

    std::vector<std::pair<std::string, std::string>> subcommands = {
        {"decompose", "split returns into overnight, potential gain and potential loss"},
        {"describe", "summary statistics and correlations"},
        {"fit", "ARMA-GARCH filtering of the gain/loss series"},
        {"granger", "Granger causality tests between gains and losses"},
        {"var", "VAR estimation and in-sample return predictability"},
        {"oos", "out-of-sample forecast evaluation and timing backtest"},
        {"controls", "predictive regressions with controls and indicators"},
        {"all", "the full pipeline"},
    };
    for (const auto& [name, desc] : subcommands) add_common(app.add_subcommand(name, desc));
    CLI::App* sim = add_common(app.add_subcommand("simulate", "synthetic-data diagnostics"));
    sim->add_option("task", simulate_task,
                    "granger-size | granger-power | garch-recovery | var-recovery")
        ->required();

    CLI11_PARSE(app, argc, argv);

    for (const auto& [name, desc] : subcommands)
        if (app.got_subcommand(name)) return run(name, "", o);
    if (app.got_subcommand("simulate")) return run("simulate", simulate_task, o);
    return 3;
}
