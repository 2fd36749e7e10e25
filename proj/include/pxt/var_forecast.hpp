#pragma once

#include <span>
#include <vector>

#include "pxt/rng.hpp"

namespace pxt {

// Two-variable VAR over (gain, loss), estimated equation by equation.
// Coefficient layout per equation: constant, then the gain lags 1..q, then
// the loss lags 1..q.
struct VarFit {
    int order = 0;
    std::vector<double> gain_eq;
    std::vector<double> loss_eq;
    std::vector<double> gain_tstat;
    std::vector<double> loss_tstat;
    double gain_r2 = 0.0;
    double loss_r2 = 0.0;
    double sic = 0.0;
    double resid_cov[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    size_t n_used = 0;
    // Fitted one-step values over the estimation sample (starts at `order`).
    std::vector<double> gain_fitted;
    std::vector<double> loss_fitted;
};

// Order chosen in 1..q_max by the Schwarz criterion, compared on the sample
// aligned at q_max lags; the winning order is refit on its maximal sample.
VarFit fit_var(std::span<const double> gain, std::span<const double> loss, int q_max);

VarFit fit_var_order(std::span<const double> gain, std::span<const double> loss, int order);

// One-step-ahead forecast given the q most recent observations
// (index 0 = most recent).
void var_one_step(const VarFit& fit, std::span<const double> recent_gain,
                  std::span<const double> recent_loss, double& gain_hat, double& loss_hat);

struct InSampleForecast {
    std::vector<double> r_hat;  // gain_fitted - loss_fitted
    double r_squared = 0.0;     // against realized r = gain - loss
    size_t start = 0;           // first forecast index in the input timeline
};

InSampleForecast in_sample_return_forecast(const VarFit& fit, std::span<const double> gain,
                                           std::span<const double> loss);

// One-step return forecasts over [from, n) with the fit's coefficients held
// fixed; element i predicts period from + i using realized lags only.
std::vector<double> static_oos_return_forecast(const VarFit& fit, std::span<const double> gain,
                                               std::span<const double> loss, size_t from);

enum class LeverageForm { squared_shock, as_written };

// Benchmark return model from closing prices only: an AR(1) mean with a
// conditional-volatility risk-premium term and an asymmetric variance
// recursion. With constant_variance the volatility term is absorbed by the
// constant and the model reduces to an AR(1) fit by least squares.
struct ArchInMeanFit {
    double delta0 = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;  // on the conditional std dev
    double omega0 = 0.0;
    double omega1 = 0.0;  // lagged conditional variance
    double omega2 = 0.0;  // lagged squared shock
    double omega3 = 0.0;  // leverage term
    bool constant_variance = false;
    LeverageForm leverage = LeverageForm::squared_shock;
    double log_likelihood = 0.0;
    double r_squared = 0.0;
    bool converged = true;
    std::vector<double> cond_variance;
    std::vector<double> delta_std_err;  // inverse-Hessian, (delta0, delta1, delta2)
};

ArchInMeanFit fit_arch_in_mean(std::span<const double> r, bool constant_variance,
                               LeverageForm leverage = LeverageForm::squared_shock);

struct OosEvaluation {
    size_t split = 0;  // first out-of-sample index
    int var_order = 0;
    std::vector<double> model_forecast;  // r^p over the evaluation window
    std::vector<double> mean_forecast;   // expanding historical average r^m
    std::vector<double> realized;
    double r2_oos = 0.0;
    double clark_west_stat = 0.0;
    double clark_west_p = 1.0;  // one-sided (upper tail), standard normal
};

// Static out-of-sample evaluation: the VAR is fit once on [0, split) with
// the order chosen by SIC on that window, then one-step forecasts run over
// [split, n) against the expanding mean benchmark (data through t-1 only).
OosEvaluation evaluate_oos(std::span<const double> gain, std::span<const double> loss,
                           std::span<const double> r, size_t split, int q_max);

// The MSPE-adjusted comparison on externally supplied forecast paths.
void clark_west(std::span<const double> realized, std::span<const double> mean_forecast,
                std::span<const double> model_forecast, double& stat, double& p_value);

double oos_r_squared(std::span<const double> realized, std::span<const double> mean_forecast,
                     std::span<const double> model_forecast);

struct VarParams {
    double gain_const = 0.0;
    double loss_const = 0.0;
    // lag-major: coefficient of lag i on gain/loss in each equation
    std::vector<double> gain_on_gain, gain_on_loss;
    std::vector<double> loss_on_gain, loss_on_loss;
    double noise_gain = 1.0;
    double noise_loss = 1.0;
    double noise_corr = 0.0;
};

void simulate_var(const VarParams& params, size_t n, Rng& rng, std::vector<double>& gain,
                  std::vector<double>& loss, size_t burn_in = 200);

}  // namespace pxt
