#include "pxt/stats.hpp"

#include <algorithm>
#include <cmath>

#include "pxt/dist.hpp"
#include "pxt/errors.hpp"

namespace pxt {

double mean(std::span<const double> x) {
    if (x.empty()) throw NumericError("mean: empty series");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) throw NumericError("variance: need at least 2 observations");
    double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double std_dev(std::span<const double> x) {
    return std::sqrt(variance(x));
}

double acf(std::span<const double> x, size_t lag) {
    const size_t n = x.size();
    if (lag >= n) throw NumericError("acf: lag must be smaller than the series length");
    double m = mean(x);
    double denom = 0.0;
    for (double v : x) denom += (v - m) * (v - m);
    if (denom == 0.0) throw NumericError("acf: constant series");
    if (lag == 0) return 1.0;
    double num = 0.0;
    for (size_t t = lag; t < n; ++t) num += (x[t] - m) * (x[t - lag] - m);
    return num / denom;
}

LjungBox ljung_box(std::span<const double> x, size_t lags) {
    const size_t n = x.size();
    if (lags == 0) throw NumericError("ljung_box: need at least one lag");
    if (n <= lags) throw NumericError("ljung_box: series shorter than lag count");
    double q = 0.0;
    for (size_t k = 1; k <= lags; ++k) {
        double r = acf(x, k);
        q += r * r / static_cast<double>(n - k);
    }
    q *= static_cast<double>(n) * static_cast<double>(n + 2);
    return {q, chi_squared_sf(q, static_cast<double>(lags)), lags};
}

JarqueBera jarque_bera(std::span<const double> x) {
    const size_t n = x.size();
    if (n < 4) throw NumericError("jarque_bera: need at least 4 observations");
    double m = mean(x);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (m2 == 0.0) throw NumericError("jarque_bera: constant series");
    JarqueBera jb;
    jb.skewness = m3 / std::pow(m2, 1.5);
    jb.kurtosis = m4 / (m2 * m2);
    double k3 = jb.kurtosis - 3.0;
    jb.statistic = static_cast<double>(n) / 6.0 * (jb.skewness * jb.skewness + 0.25 * k3 * k3);
    jb.p_value = chi_squared_sf(jb.statistic, 2.0);
    return jb;
}

SummaryStats summarize(std::span<const double> x, std::span<const size_t> acf_lags, size_t q_lag) {
    const size_t n = x.size();
    if (n < q_lag + 1) throw NumericError("summarize: series too short for Q lag");
    SummaryStats s;
    s.n = n;
    s.mean = mean(x);
    s.std_dev = std_dev(x);
    if (s.std_dev == 0.0) throw NumericError("summarize: constant series");
    s.max = *std::max_element(x.begin(), x.end());
    s.min = *std::min_element(x.begin(), x.end());
    JarqueBera jb = jarque_bera(x);
    s.skewness = jb.skewness;
    s.kurtosis = jb.kurtosis;
    s.jarque_bera = jb.statistic;
    s.jb_pvalue = jb.p_value;
    for (size_t lag : acf_lags) {
        s.acf_lags.push_back(lag);
        s.acf_values.push_back(acf(x, lag));
    }
    if (q_lag > 0) {
        LjungBox lb = ljung_box(x, q_lag);
        s.ljung_box_q = lb.q;
        s.ljung_box_p = lb.p_value;
        s.ljung_box_lag = q_lag;
    }
    return s;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw NumericError("pearson: length mismatch");
    const size_t n = x.size();
    if (n < 3) throw NumericError("pearson: need at least 3 observations");
    double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw NumericError("pearson: constant series");
    return sxy / std::sqrt(sxx * syy);
}

CorrelationMatrix correlation_matrix(const std::vector<std::vector<double>>& series) {
    const size_t k = series.size();
    if (k == 0) throw NumericError("correlation_matrix: no series");
    const size_t n = series[0].size();
    for (const auto& s : series)
        if (s.size() != n) throw NumericError("correlation_matrix: unequal lengths");
    CorrelationMatrix out;
    out.n = n;
    out.corr.assign(k, std::vector<double>(k, 1.0));
    out.p_value.assign(k, std::vector<double>(k, 0.0));
    const double dof = static_cast<double>(n) - 2.0;
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = i + 1; j < k; ++j) {
            double r = pearson(series[i], series[j]);
            double t = r * std::sqrt(dof / std::max(1.0 - r * r, 1e-300));
            double p = student_t_two_sided(t, dof);
            out.corr[i][j] = out.corr[j][i] = r;
            out.p_value[i][j] = out.p_value[j][i] = p;
        }
    }
    return out;
}

std::vector<double> standardize(std::span<const double> x) {
    double m = mean(x);
    double s = std_dev(x);
    if (s == 0.0) throw NumericError("standardize: zero variance");
    std::vector<double> z(x.size());
    for (size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - m) / s;
    return z;
}

}  // namespace pxt
