#include "pxt/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pxt/errors.hpp"

namespace pxt {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr size_t kHighWindow = 250;  // trading days in 52 weeks
constexpr size_t kMaWindow = 200;
constexpr size_t kSkewWindow = 200;
constexpr int kLongRunYears = 30;

Date period_end(const Date& d, Frequency freq) {
    if (freq == Frequency::daily) return d;
    return Date{d.year, d.month, 31};  // lexicographic upper bound within the month
}

}  // namespace

std::vector<IndicatorSeries> build_indicators(const BarSeries& daily, const BarSeries& calendar) {
    if (daily.frequency != Frequency::daily)
        throw DataError("build_indicators: first series must be daily");
    const size_t nd = daily.size();
    const size_t nc = calendar.size();
    if (nd < 2 || nc < 2) throw DataError("build_indicators: series too short");

    // Latest daily observation at or before each calendar period end.
    std::vector<long> day_at(nc, -1);
    {
        size_t j = 0;
        for (size_t i = 0; i < nc; ++i) {
            Date cutoff = period_end(calendar.bars[i].date, calendar.frequency);
            while (j < nd && !(cutoff < daily.bars[j].date)) ++j;
            day_at[i] = static_cast<long>(j) - 1;
        }
    }

    std::vector<double> close(nd);
    for (size_t i = 0; i < nd; ++i) close[i] = daily.bars[i].close;
    std::vector<double> dret(nd, 0.0);
    for (size_t i = 1; i < nd; ++i) dret[i] = std::log(close[i] / close[i - 1]);

    std::vector<double> running_max(nd);
    std::vector<double> prefix_close(nd + 1, 0.0);
    std::vector<double> prefix_ret(nd + 1, 0.0), prefix_ret2(nd + 1, 0.0);
    for (size_t i = 0; i < nd; ++i) {
        running_max[i] = i == 0 ? close[0] : std::max(running_max[i - 1], close[i]);
        prefix_close[i + 1] = prefix_close[i] + close[i];
        prefix_ret[i + 1] = prefix_ret[i] + dret[i];
        prefix_ret2[i + 1] = prefix_ret2[i] + dret[i] * dret[i];
    }

    IndicatorSeries h52{"H52", std::vector<double>(nc, kNan), 0, false};
    IndicatorSeries hmax{"Hmax", std::vector<double>(nc, kNan), 0, false};
    IndicatorSeries ima{"I_MA", std::vector<double>(nc, kNan), 0, false};
    IndicatorSeries sk{"SK", std::vector<double>(nc, kNan), 0, false};

    bool h52_started = false, ima_started = false, sk_started = false, hmax_started = false;
    for (size_t i = 0; i < nc; ++i) {
        long d = day_at[i];
        if (d < 0) continue;
        const size_t di = static_cast<size_t>(d);
        const double p = close[di];

        if (!hmax_started) {
            hmax.first_valid = i;
            hmax_started = true;
        }
        hmax.values[i] = p / running_max[di];

        if (di + 1 >= kHighWindow) {
            double hi = 0.0;
            for (size_t t = di + 1 - kHighWindow; t <= di; ++t) hi = std::max(hi, close[t]);
            if (!h52_started) {
                h52.first_valid = i;
                h52_started = true;
            }
            h52.values[i] = p / hi;
        }

        if (di + 1 >= kMaWindow) {
            double ma = (prefix_close[di + 1] - prefix_close[di + 1 - kMaWindow]) /
                        static_cast<double>(kMaWindow);
            if (!ima_started) {
                ima.first_valid = i;
                ima_started = true;
            }
            ima.values[i] = p > ma ? 1.0 : 0.0;
        }

        if (di >= kSkewWindow) {  // needs 200 returns, i.e. 201 closes
            const size_t lo = di + 1 - kSkewWindow;
            const double w = static_cast<double>(kSkewWindow);
            double u = (prefix_ret[di + 1] - prefix_ret[lo]) / w;
            double sigma = (prefix_ret2[di + 1] - prefix_ret2[lo]) / w - u * u;
            // the scale term enters as the mean squared deviation, cubed sum over it
            if (sigma > 0.0) {
                double s3 = 0.0;
                for (size_t t = lo; t <= di; ++t) {
                    double z = (dret[t] - u) / sigma;
                    s3 += z * z * z;
                }
                if (!sk_started) {
                    sk.first_valid = i;
                    sk_started = true;
                }
                sk.values[i] = s3 / w;
            }
        }
    }

    // Mean reversion indicator from the calendar's own close-to-close returns.
    const size_t ppy = calendar.frequency == Frequency::quarterly ? 4u : 12u;
    IndicatorSeries mri{"MRI", std::vector<double>(nc, kNan), 0, false};
    std::vector<double> cret(nc, 0.0);
    for (size_t i = 1; i < nc; ++i)
        cret[i] = std::log(calendar.bars[i].close / calendar.bars[i - 1].close);
    const size_t long_run = static_cast<size_t>(kLongRunYears) * ppy;
    bool mri_started = false;
    for (size_t i = ppy; i < nc; ++i) {
        double year_ret = 0.0;
        for (size_t t = i + 1 - ppy; t <= i; ++t) year_ret += cret[t];
        double m = year_ret / static_cast<double>(ppy);
        double var = 0.0;
        for (size_t t = i + 1 - ppy; t <= i; ++t) var += (cret[t] - m) * (cret[t] - m);
        var /= static_cast<double>(ppy - 1);
        double sigma_annual = std::sqrt(var * static_cast<double>(ppy));
        if (!(sigma_annual > 0.0)) continue;

        size_t lo = i >= long_run ? i + 1 - long_run : 1;
        if (i + 1 - lo < long_run) mri.partial_history = true;
        double lr_mean = 0.0;
        for (size_t t = lo; t <= i; ++t) lr_mean += cret[t];
        lr_mean = lr_mean / static_cast<double>(i - lo + 1) * static_cast<double>(ppy);

        if (!mri_started) {
            mri.first_valid = i;
            mri_started = true;
        }
        mri.values[i] = (year_ret - lr_mean) / sigma_annual;
    }

    return {std::move(mri), std::move(ima), std::move(h52), std::move(hmax), std::move(sk)};
}

}  // namespace pxt
