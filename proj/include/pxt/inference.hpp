#pragma once

#include <span>
#include <string>
#include <vector>

#include "pxt/linalg.hpp"

namespace pxt {

struct GrangerResult {
    std::string x_name;
    std::string y_name;
    size_t lag = 0;
    double f_stat = 0.0;
    double p_value = 1.0;
    size_t n_used = 0;  // regression rows after alignment
};

// Does X Granger-cause Y? Restricted model regresses y on a constant and m
// of its own lags; the unrestricted model adds m lags of x. Both are
// estimated on the identical aligned sample and compared by the F statistic
// on the added block.
GrangerResult granger_test(std::span<const double> x, std::span<const double> y, size_t lag,
                           const std::string& x_name = "x", const std::string& y_name = "y");

struct OlsTerm {
    std::string name;
    double coef = 0.0;
    double std_err = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
};

struct OlsResult {
    std::vector<OlsTerm> terms;
    double r_squared = 0.0;
    size_t n = 0;
    size_t dropped = 0;  // rows lost to missing values during alignment
};

// OLS of chi_t on a constant and psi_{t-lag}; the slope measures the impact
// of a unit shock in psi on chi.
OlsResult impact_regression(std::span<const double> chi, std::span<const double> psi, size_t lag);

struct ControlTerm {
    std::string name;
    std::vector<double> values;  // aligned to the filtered series; NaN = missing
};

// Predictive regression of gain_f at t+1 on a constant, loss_f at t and the
// given controls at t (and at t+1 when include_contemporaneous is set).
// Rows with any missing value are dropped and counted.
OlsResult control_regression(std::span<const double> gain_f, std::span<const double> loss_f,
                             const std::vector<ControlTerm>& controls,
                             bool include_contemporaneous);

}  // namespace pxt
