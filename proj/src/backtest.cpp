#include "pxt/backtest.hpp"

#include <algorithm>
#include <cmath>

#include "pxt/errors.hpp"
#include "pxt/stats.hpp"

namespace pxt {

std::vector<double> rolling_variance(std::span<const double> r, size_t window) {
    if (window < 2) throw NumericError("rolling_variance: window must be >= 2");
    if (r.size() < window) throw DataError("rolling_variance: series shorter than window");
    std::vector<double> out;
    out.reserve(r.size() - window + 1);
    for (size_t end = window; end <= r.size(); ++end) {
        out.push_back(variance(r.subspan(end - window, window)));
    }
    return out;
}

namespace {

double clamp_weight(double w, const BacktestConfig& cfg, size_t& low, size_t& high) {
    if (w < cfg.weight_min) {
        ++low;
        return cfg.weight_min;
    }
    if (w > cfg.weight_max) {
        ++high;
        return cfg.weight_max;
    }
    return w;
}

}  // namespace

BacktestReport run_backtest(std::span<const double> r, size_t split,
                            std::span<const double> mean_forecast,
                            std::span<const double> model_forecast, std::span<const double> rf,
                            const BacktestConfig& cfg) {
    const size_t n = r.size();
    const size_t horizon = n - split;
    if (split >= n) throw DataError("run_backtest: empty evaluation window");
    if (mean_forecast.size() != horizon || model_forecast.size() != horizon ||
        rf.size() != horizon)
        throw DataError("run_backtest: forecasts and risk-free must cover the evaluation window");
    if (split < cfg.variance_window)
        throw DataError("run_backtest: need " + std::to_string(cfg.variance_window) +
                        " returns before the first evaluation period");
    if (!(cfg.gamma > 0.0) || !(cfg.weight_min < cfg.weight_max))
        throw ConfigError("run_backtest: invalid configuration");

    BacktestReport rep;
    rep.weight_bench.reserve(horizon);
    rep.weight_model.reserve(horizon);
    rep.ret_bench.reserve(horizon);
    rep.ret_model.reserve(horizon);
    rep.risk_free.assign(rf.begin(), rf.end());

    for (size_t i = 0; i < horizon; ++i) {
        const size_t t = split + i;  // period being realized
        double var_hat = variance(r.subspan(t - cfg.variance_window, cfg.variance_window));
        double wb, wm;
        if (var_hat < 1e-12) {
            // Degenerate variance: the sign of the excess forecast decides.
            wb = mean_forecast[i] - rf[i] >= 0.0 ? cfg.weight_max : cfg.weight_min;
            wm = model_forecast[i] - rf[i] >= 0.0 ? cfg.weight_max : cfg.weight_min;
        } else {
            wb = (mean_forecast[i] - rf[i]) / (cfg.gamma * var_hat);
            wm = (model_forecast[i] - rf[i]) / (cfg.gamma * var_hat);
            wb = clamp_weight(wb, cfg, rep.clamped_low, rep.clamped_high);
            wm = clamp_weight(wm, cfg, rep.clamped_low, rep.clamped_high);
        }
        rep.weight_bench.push_back(wb);
        rep.weight_model.push_back(wm);
        rep.ret_bench.push_back(wb * (r[t] - rf[i]) + rf[i]);
        rep.ret_model.push_back(wm * (r[t] - rf[i]) + rf[i]);
    }

    rep.utility_bench = mean(rep.ret_bench) - 0.5 * cfg.gamma * variance(rep.ret_bench);
    rep.utility_model = mean(rep.ret_model) - 0.5 * cfg.gamma * variance(rep.ret_model);
    rep.cer_gain = cfg.annualization * (rep.utility_model - rep.utility_bench);

    std::vector<double> excess_model(horizon), excess_bh(horizon);
    for (size_t i = 0; i < horizon; ++i) {
        excess_model[i] = rep.ret_model[i] - rf[i];
        excess_bh[i] = r[split + i] - rf[i];
    }
    double sd_m = std_dev(excess_model);
    double sd_b = std_dev(excess_bh);
    rep.sharpe_model = sd_m > 0.0 ? mean(excess_model) / sd_m : 0.0;
    rep.sharpe_buy_hold = sd_b > 0.0 ? mean(excess_bh) / sd_b : 0.0;
    return rep;
}

}  // namespace pxt
