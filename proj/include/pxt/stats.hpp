#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pxt {

double mean(std::span<const double> x);
// Sample variance, divisor n - 1.
double variance(std::span<const double> x);
double std_dev(std::span<const double> x);

// Autocorrelation at lag k with the divisor-n autocovariance normalization.
double acf(std::span<const double> x, size_t lag);

struct LjungBox {
    double q = 0.0;
    double p_value = 1.0;
    size_t lags = 0;
};

LjungBox ljung_box(std::span<const double> x, size_t lags);

struct JarqueBera {
    double statistic = 0.0;
    double p_value = 1.0;
    double skewness = 0.0;
    double kurtosis = 0.0;  // non-excess
};

JarqueBera jarque_bera(std::span<const double> x);

struct SummaryStats {
    size_t n = 0;
    double mean = 0.0;
    double std_dev = 0.0;
    double max = 0.0;
    double min = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;      // non-excess, normal benchmark is 3
    double jarque_bera = 0.0;
    double jb_pvalue = 1.0;
    std::vector<size_t> acf_lags;
    std::vector<double> acf_values;
    double ljung_box_q = 0.0;
    double ljung_box_p = 1.0;
    size_t ljung_box_lag = 0;
};

// Moments, Jarque-Bera, ACF at the requested lags and Ljung-Box Q(q_lag).
// Skewness and kurtosis use the biased moment estimators; std_dev uses the
// n - 1 divisor. Throws on a constant series.
SummaryStats summarize(std::span<const double> x, std::span<const size_t> acf_lags, size_t q_lag);

struct CorrelationMatrix {
    std::vector<std::vector<double>> corr;
    std::vector<std::vector<double>> p_value;  // two-sided, t(n - 2)
    size_t n = 0;
};

CorrelationMatrix correlation_matrix(const std::vector<std::vector<double>>& series);

double pearson(std::span<const double> x, std::span<const double> y);

// Z-scores: (x - mean) / sample std dev. Throws on zero variance.
std::vector<double> standardize(std::span<const double> x);

}  // namespace pxt
