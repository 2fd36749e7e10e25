#include "pxt/decompose.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "pxt/errors.hpp"
#include "pxt/linalg.hpp"
#include "pxt/stats.hpp"

namespace pxt {

const char* to_string(Convention c) {
    return c == Convention::high_extreme ? "high_extreme" : "low_extreme";
}

Convention convention_from_string(const std::string& s) {
    if (s == "high" || s == "high_extreme") return Convention::high_extreme;
    if (s == "low" || s == "low_extreme") return Convention::low_extreme;
    throw ConfigError("unknown convention '" + s + "' (expected high or low)");
}

DecomposedSeries decompose(const BarSeries& series, Convention convention) {
    if (series.size() < 2) throw DataError("decompose: need at least 2 bars");
    DecomposedSeries d;
    d.convention = convention;
    d.frequency = series.frequency;
    const size_t n = series.size();
    d.dates.reserve(n - 1);
    d.r_full.reserve(n - 1);
    d.r.reserve(n - 1);
    d.ovr.reserve(n - 1);
    d.pmg.reserve(n - 1);
    d.pml.reserve(n - 1);
    for (size_t t = 1; t < n; ++t) {
        const OhlcBar& bar = series.bars[t];
        const double prev_close = series.bars[t - 1].close;
        if (!(bar.open > 0.0 && bar.high > 0.0 && bar.low > 0.0 && bar.close > 0.0 &&
              prev_close > 0.0))
            throw DataError("decompose: non-positive price at " +
                            format_date(bar.date, series.frequency));
        const double lo = std::log(bar.open);
        const double lh = std::log(bar.high);
        const double ll = std::log(bar.low);
        const double lc = std::log(bar.close);
        d.dates.push_back(bar.date);
        d.ovr.push_back(lo - std::log(prev_close));
        if (convention == Convention::high_extreme) {
            d.pmg.push_back(lh - lo);
            d.pml.push_back(lh - lc);
        } else {
            d.pmg.push_back(lc - ll);
            d.pml.push_back(lo - ll);
        }
        d.r.push_back(lc - lo);
        d.r_full.push_back(lc - std::log(prev_close));
    }
    return d;
}

OvernightShare overnight_share(const DecomposedSeries& d) {
    const size_t n = d.size();
    if (n < 3) throw NumericError("overnight_share: need at least 3 periods");
    Matrix x(n, 2);
    for (size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = d.r[i];
    }
    LeastSquares fit = ols(x, d.r_full);
    return {fit.coef[1], fit.coef[0], fit.r_squared};
}

namespace {

// Covariance with divisor n over an explicitly aligned window.
double cov_aligned(const std::vector<double>& x, const std::vector<double>& y, size_t lag) {
    const size_t n = x.size();
    const size_t m = n - lag;
    double mx = 0.0, my = 0.0;
    for (size_t t = lag; t < n; ++t) {
        mx += x[t];
        my += y[t - lag];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double s = 0.0;
    for (size_t t = lag; t < n; ++t) s += (x[t] - mx) * (y[t - lag] - my);
    return s / static_cast<double>(m);
}

}  // namespace

CovarianceDecomposition covariance_decomposition(const DecomposedSeries& d, size_t lag) {
    const size_t n = d.size();
    if (lag == 0 || lag >= n) throw NumericError("covariance_decomposition: lag out of range");
    CovarianceDecomposition out;
    out.gain_gain = cov_aligned(d.pmg, d.pmg, lag);
    out.loss_loss = cov_aligned(d.pml, d.pml, lag);
    out.gain_loss = cov_aligned(d.pmg, d.pml, lag);
    out.loss_gain = cov_aligned(d.pml, d.pmg, lag);
    out.combined = out.gain_gain + out.loss_loss - out.gain_loss - out.loss_gain;
    out.cov_r = cov_aligned(d.r, d.r, lag);
    return out;
}

void write_decomposed_csv(const DecomposedSeries& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "date,r_full,r,ovr,pmg,pml\n";
    char buf[200];
    for (size_t i = 0; i < d.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      format_date(d.dates[i], d.frequency).c_str(), d.r_full[i], d.r[i], d.ovr[i],
                      d.pmg[i], d.pml[i]);
        out << buf;
    }
}

}  // namespace pxt
