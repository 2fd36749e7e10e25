// Brute-force reference implementations used only by the tests. These are
// written as direct transcriptions of the textbook formulas (loops and
// normal equations), independent of the library's computation paths.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double variance_n1(const std::vector<double>& x) {
    double m = mean(x), s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

// population covariance of (x_t, y_{t-lag}) over the aligned window
inline double cov_aligned(const std::vector<double>& x, const std::vector<double>& y, size_t lag) {
    const size_t n = x.size();
    const size_t m = n - lag;
    double mx = 0.0, my = 0.0;
    for (size_t t = lag; t < n; ++t) {
        mx += x[t];
        my += y[t - lag];
    }
    mx /= m;
    my /= m;
    double s = 0.0;
    for (size_t t = lag; t < n; ++t) s += (x[t] - mx) * (y[t - lag] - my);
    return s / m;
}

inline double acf(const std::vector<double>& x, size_t k) {
    const size_t n = x.size();
    double m = mean(x);
    double num = 0.0, den = 0.0;
    for (size_t t = 0; t < n; ++t) den += (x[t] - m) * (x[t] - m);
    for (size_t t = k; t < n; ++t) num += (x[t] - m) * (x[t - k] - m);
    return num / den;
}

inline double ljung_box_q(const std::vector<double>& x, size_t lags) {
    const double n = static_cast<double>(x.size());
    double q = 0.0;
    for (size_t k = 1; k <= lags; ++k) {
        double r = acf(x, k);
        q += r * r / (n - static_cast<double>(k));
    }
    return n * (n + 2.0) * q;
}

inline double jarque_bera(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double m = mean(x);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    double skew = m3 / std::pow(m2, 1.5);
    double kurt = m4 / (m2 * m2);
    return n / 6.0 * (skew * skew + (kurt - 3.0) * (kurt - 3.0) / 4.0);
}

struct Ols {
    std::vector<double> coef;
    double ssr = 0.0;
    double r_squared = 0.0;
};

// normal equations solved by Gaussian elimination with partial pivoting
inline Ols ols(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    const size_t k = x[0].size();
    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j < k; ++j)
            for (size_t t = 0; t < n; ++t) a[i][j] += x[t][i] * x[t][j];
        for (size_t t = 0; t < n; ++t) a[i][k] += x[t][i] * y[t];
    }
    for (size_t col = 0; col < k; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < k; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        if (std::fabs(a[col][col]) < 1e-300) throw std::runtime_error("oracle ols: singular");
        for (size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (size_t c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
        }
    }
    Ols out;
    out.coef.resize(k);
    for (size_t i = 0; i < k; ++i) out.coef[i] = a[i][k] / a[i][i];
    double ybar = mean(y), sst = 0.0;
    for (size_t t = 0; t < n; ++t) {
        double fit = 0.0;
        for (size_t j = 0; j < k; ++j) fit += x[t][j] * out.coef[j];
        out.ssr += (y[t] - fit) * (y[t] - fit);
        sst += (y[t] - ybar) * (y[t] - ybar);
    }
    out.r_squared = sst > 0.0 ? 1.0 - out.ssr / sst : 0.0;
    return out;
}

// F statistic for "x Granger-causes y" with m lags of each series
inline double granger_f(const std::vector<double>& x, const std::vector<double>& y, size_t m) {
    const size_t n = y.size();
    const size_t rows = n - m;
    std::vector<std::vector<double>> xr(rows), xu(rows);
    std::vector<double> dep(rows);
    for (size_t t = m; t < n; ++t) {
        const size_t r = t - m;
        dep[r] = y[t];
        xr[r].push_back(1.0);
        xu[r].push_back(1.0);
        for (size_t j = 1; j <= m; ++j) {
            xr[r].push_back(y[t - j]);
            xu[r].push_back(y[t - j]);
        }
        for (size_t j = 1; j <= m; ++j) xu[r].push_back(x[t - j]);
    }
    Ols restricted = ols(xr, dep);
    Ols unrestricted = ols(xu, dep);
    double dof2 = static_cast<double>(rows) - (2.0 * m + 1.0);
    return ((restricted.ssr - unrestricted.ssr) / static_cast<double>(m)) /
           (unrestricted.ssr / dof2);
}

struct ClarkWest {
    double stat = 0.0;
    double fbar = 0.0;
    std::vector<double> f;
};

inline ClarkWest clark_west(const std::vector<double>& r, const std::vector<double>& rm,
                            const std::vector<double>& rp) {
    ClarkWest out;
    const size_t n = r.size();
    out.f.resize(n);
    for (size_t i = 0; i < n; ++i) {
        out.f[i] = (r[i] - rm[i]) * (r[i] - rm[i]) -
                   ((r[i] - rp[i]) * (r[i] - rp[i]) - (rm[i] - rp[i]) * (rm[i] - rp[i]));
    }
    out.fbar = mean(out.f);
    double se = std::sqrt(variance_n1(out.f) / static_cast<double>(n));
    out.stat = out.fbar / se;
    return out;
}

inline std::vector<double> rolling_variance(const std::vector<double>& r, size_t w) {
    std::vector<double> out;
    for (size_t end = w; end <= r.size(); ++end) {
        std::vector<double> window(r.begin() + (end - w), r.begin() + end);
        out.push_back(variance_n1(window));
    }
    return out;
}

}  // namespace oracle
