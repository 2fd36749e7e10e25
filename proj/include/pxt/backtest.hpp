#pragma once

#include <span>
#include <vector>

namespace pxt {

struct BacktestConfig {
    double gamma = 3.0;            // relative risk aversion
    double weight_min = 0.0;
    double weight_max = 1.5;
    size_t variance_window = 120;  // trailing periods for the variance estimate
    double annualization = 1200.0; // 1200 monthly, 400 quarterly
};

struct BacktestReport {
    std::vector<double> weight_bench;   // from the expanding-mean forecast
    std::vector<double> weight_model;
    std::vector<double> ret_bench;      // realized portfolio returns
    std::vector<double> ret_model;
    std::vector<double> risk_free;
    double utility_bench = 0.0;         // mu - 0.5 gamma sigma^2, per period
    double utility_model = 0.0;
    double cer_gain = 0.0;              // annualization * (utility_model - utility_bench)
    double sharpe_model = 0.0;          // per-period, mean excess / std excess
    double sharpe_buy_hold = 0.0;
    size_t clamped_low = 0;             // pre-clamp weights outside the bounds
    size_t clamped_high = 0;
};

// Trailing sample variance (divisor n - 1): element i is the variance of
// the `window` values ending at r[i - 1], so index i is usable as the
// estimate formed at the end of period i - 1.
std::vector<double> rolling_variance(std::span<const double> r, size_t window);

// Mean-variance timing: at the end of each period the investor allocates
// w = (forecast - rf) / (gamma * variance) to equities, clamped to the
// configured bounds, and realizes w * (r - rf) + rf next period.
//
// `r` is the full return series; forecasts cover [split, r.size()) and
// `rf` is aligned to the same window. At least `variance_window` returns
// must precede the split.
BacktestReport run_backtest(std::span<const double> r, size_t split,
                            std::span<const double> mean_forecast,
                            std::span<const double> model_forecast, std::span<const double> rf,
                            const BacktestConfig& cfg);

}  // namespace pxt
