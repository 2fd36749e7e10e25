#pragma once

#include <string>
#include <vector>

#include "pxt/dates.hpp"

namespace pxt {

struct OhlcBar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
};

// Throws DataError when prices are non-positive or the extremes do not
// bracket open/close. `row` feeds the error message (1-based, 0 = unknown).
void validate_bar(const OhlcBar& bar, size_t row = 0);

struct BarSeries {
    Frequency frequency = Frequency::monthly;
    std::vector<OhlcBar> bars;

    size_t size() const { return bars.size(); }
    std::vector<double> closes() const;
    std::vector<Date> dates() const;
};

// Reads `date,open,high,low,close` rows (header required), validates every
// bar and checks strictly increasing dates.
BarSeries load_bars(const std::string& path, Frequency frequency);

// Canonical writer; load_bars(write_bars(s)) reproduces s exactly.
void write_bars(const BarSeries& series, const std::string& path);

// Tri-monthly aggregation: quarter low/high are the min/max of the three
// monthly lows/highs, open is the first month's open, close the last
// month's close. The series must start on a quarter's first month; a
// trailing partial quarter is dropped and reported through `warning`.
BarSeries to_quarterly(const BarSeries& monthly, std::string* warning = nullptr);

struct PredictorSeries {
    std::string name;
    std::vector<double> values;  // aligned to a calendar; NaN marks missing
    size_t n_missing = 0;
};

struct PredictorTable {
    std::vector<PredictorSeries> series;
    size_t dropped_rows = 0;  // file rows whose date is not on the calendar
};

// Wide layout: a date column followed by one column per predictor. Values
// are aligned onto the calendar of `calendar`; calendar periods absent from
// the file become explicit missing entries.
PredictorTable load_predictors(const std::string& path, const BarSeries& calendar);

}  // namespace pxt
