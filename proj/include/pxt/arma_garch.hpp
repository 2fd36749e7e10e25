#pragma once

#include <span>
#include <string>
#include <vector>

#include "pxt/rng.hpp"

namespace pxt {

// ARMA(l, m) mean equation with an optional GARCH(1,1)-type variance.
// `garch` counts lags of the conditional variance, `arch` lags of the
// squared shock; both zero means constant variance.
struct ArmaGarchSpec {
    int ar = 0;
    int ma = 0;
    int garch = 0;
    int arch = 0;

    bool constant_variance() const { return garch == 0 && arch == 0; }
    int free_parameters() const { return 1 + ar + ma + 1 + garch + arch; }
    std::string label() const;
};

void validate_spec(const ArmaGarchSpec& spec);

enum class FitStatus { converged, max_iterations, boundary };

const char* to_string(FitStatus s);

struct ArmaGarchFit {
    ArmaGarchSpec spec;
    // Mean equation: y_t = mu + sum phi_i (y_{t-i} - mu) + sum theta_j u_{t-j} + u_t.
    // mu is the unconditional mean, matching the usual packaged-ARMA report.
    double mu = 0.0;
    std::vector<double> ar_coef;
    std::vector<double> ma_coef;
    // Variance equation: h_t = omega + sum garch_i h_{t-i} + sum arch_j u^2_{t-j}.
    double omega = 0.0;
    std::vector<double> garch_coef;
    std::vector<double> arch_coef;

    double log_likelihood = 0.0;
    double aic = 0.0;
    double r_squared = 0.0;           // of the mean equation
    std::vector<double> residuals;    // u_t, full input length
    std::vector<double> cond_variance;
    std::vector<double> std_residuals;  // u_t / sqrt(h_t)
    FitStatus status = FitStatus::converged;
    // Inverse-Hessian standard errors in the order
    // (mu, ar..., ma..., omega, garch..., arch...); NaN when the Hessian
    // is not positive definite at the optimum.
    std::vector<double> std_errors;

    std::vector<double> natural_parameters() const;
};

std::vector<double> sqrt_transform(std::span<const double> x);

// Gaussian quasi-maximum-likelihood with conditional (pre-sample)
// initialization: pre-sample mean deviations and shocks are zero, the
// pre-sample conditional variance is the residual variance of a preliminary
// least-squares pass. Residuals are produced for every input period.
ArmaGarchFit fit_arma_garch(std::span<const double> y, const ArmaGarchSpec& spec);

// AR 1..2, MA 0..2, each with and without the GARCH(1,1) variance.
std::vector<ArmaGarchSpec> default_spec_grid();

// Minimum-AIC converged fit; ties go to fewer parameters, then to the
// lexicographically smaller (ar, ma, garch, arch).
ArmaGarchFit select_arma_garch(std::span<const double> y, const std::vector<ArmaGarchSpec>& grid);

// Standardized residuals re-standardized to exact mean 0 / std 1.
std::vector<double> filtered_series(const ArmaGarchFit& fit);

// Log-likelihood of the data under explicitly given natural parameters
// (same order as ArmaGarchFit::natural_parameters). Exposed for the
// local-optimality checks.
double arma_garch_loglik(std::span<const double> y, const ArmaGarchSpec& spec,
                         std::span<const double> natural, double presample_variance);

double fitted_presample_variance(const ArmaGarchFit& fit, std::span<const double> y);

struct ArmaGarchParams {
    double mu = 0.0;
    std::vector<double> ar_coef;
    std::vector<double> ma_coef;
    double omega = 1.0;
    std::vector<double> garch_coef;
    std::vector<double> arch_coef;
};

std::vector<double> simulate_arma_garch(const ArmaGarchParams& params, size_t n, Rng& rng,
                                        size_t burn_in = 500);

}  // namespace pxt
