#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pxt/backtest.hpp"
#include "pxt/bars.hpp"
#include "pxt/decompose.hpp"
#include "pxt/var_forecast.hpp"

namespace pxt {

struct RunConfig {
    std::string bars_path;
    Frequency bars_frequency = Frequency::monthly;
    Frequency frequency = Frequency::monthly;  // analysis frequency; monthly
                                               // input is aggregated when this
                                               // is quarterly
    std::string daily_bars_path;
    std::string predictors_path;
    std::string sentiment_path;
    Convention convention = Convention::high_extreme;
    std::vector<size_t> granger_lags = {2, 4, 6};
    bool granger_filtered = true;
    std::vector<std::string> oos_splits;  // default depends on frequency
    std::vector<std::pair<std::string, std::string>> subsamples;  // extra fit windows
    int q_max = 6;
    double gamma = 3.0;
    double weight_min = 0.0;
    double weight_max = 1.5;
    size_t variance_window = 0;  // 0 = 120 monthly / 40 quarterly
    LeverageForm leverage = LeverageForm::squared_shock;
    std::optional<bool> aim_constant_variance;  // default: quarterly only
    std::string output_dir;  // empty = $PXT_OUTPUT_DIR or "."
    uint64_t seed = 20240915;
    int sims = 500;

    static RunConfig from_json_text(const std::string& text);
    std::string to_json_text() const;  // canonical; feeds the config hash

    size_t effective_variance_window() const;
    double annualization() const;
    size_t min_training() const;
    size_t periods_per_year() const;
};

struct RunOutput {
    std::vector<std::string> files;
    std::vector<std::string> notes;  // skipped stages, warnings
    std::string summary_json() const;
};

// Drives the full pipeline. Subcommands:
//   decompose  describe  fit  granger  var  oos  controls  simulate  all
// `simulate` takes a task argument: granger-size, granger-power,
// garch-recovery or var-recovery.
class Engine {
  public:
    explicit Engine(RunConfig cfg);
    ~Engine();

    RunOutput run(const std::string& subcommand, const std::string& argument = "");

    const RunConfig& config() const;

  private:
    struct State;
    std::unique_ptr<State> state_;
};

}  // namespace pxt
