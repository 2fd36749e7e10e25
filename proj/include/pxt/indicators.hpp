#pragma once

#include <string>
#include <vector>

#include "pxt/bars.hpp"

namespace pxt {

struct IndicatorSeries {
    std::string name;
    std::vector<double> values;  // aligned to the calendar; NaN before first_valid
    size_t first_valid = 0;
    bool partial_history = false;  // a trailing window was shorter than intended
};

// Price-path indicators evaluated at each calendar period end from daily
// closes, plus the mean-reversion indicator built from the calendar's own
// returns:
//   H52  - close relative to its 250-trading-day high (current day included)
//   Hmax - close relative to its running historical high
//   I_MA - 1 when the close sits above its 200-day moving average
//   SK   - trailing-200-day skewness-style statistic of daily log returns
//   MRI  - (trailing one-year return - long-run mean) / annualized one-year
//          volatility; the long-run mean uses up to 30 years of history and
//          flags shorter samples
std::vector<IndicatorSeries> build_indicators(const BarSeries& daily, const BarSeries& calendar);

}  // namespace pxt
