#include "pxt/var_forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pxt/dist.hpp"
#include "pxt/errors.hpp"
#include "pxt/linalg.hpp"
#include "pxt/optim.hpp"
#include "pxt/stats.hpp"

namespace pxt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;

struct VarDesign {
    Matrix x;
    std::vector<double> gain_dep;
    std::vector<double> loss_dep;
};

VarDesign build_design(std::span<const double> gain, std::span<const double> loss, int order,
                       size_t start) {
    const size_t n = gain.size();
    const size_t rows = n - start;
    VarDesign d{Matrix(rows, 2 * order + 1), std::vector<double>(rows), std::vector<double>(rows)};
    for (size_t t = start; t < n; ++t) {
        const size_t r = t - start;
        d.gain_dep[r] = gain[t];
        d.loss_dep[r] = loss[t];
        d.x(r, 0) = 1.0;
        for (int i = 1; i <= order; ++i) {
            d.x(r, i) = gain[t - i];
            d.x(r, order + i) = loss[t - i];
        }
    }
    return d;
}

double var_sic(const LeastSquares& g, const LeastSquares& l, size_t rows, int order) {
    // MLE residual covariance (divisor T), log det for the bivariate system.
    double s11 = 0.0, s22 = 0.0, s12 = 0.0;
    for (size_t i = 0; i < rows; ++i) {
        s11 += g.residuals[i] * g.residuals[i];
        s22 += l.residuals[i] * l.residuals[i];
        s12 += g.residuals[i] * l.residuals[i];
    }
    const double t = static_cast<double>(rows);
    s11 /= t;
    s22 /= t;
    s12 /= t;
    double det = s11 * s22 - s12 * s12;
    if (!(det > 0.0)) throw NumericError("fit_var: degenerate residual covariance");
    const double k = 2.0 * (2.0 * order + 1.0);
    return std::log(det) + k * std::log(t) / t;
}

}  // namespace

VarFit fit_var_order(std::span<const double> gain, std::span<const double> loss, int order) {
    if (gain.size() != loss.size()) throw NumericError("fit_var: length mismatch");
    if (order < 1) throw NumericError("fit_var: order must be >= 1");
    const size_t n = gain.size();
    if (n <= static_cast<size_t>(10 * order)) throw NumericError("fit_var: series too short");

    VarDesign d = build_design(gain, loss, order, static_cast<size_t>(order));
    LeastSquares g = ols(d.x, d.gain_dep);
    LeastSquares l = ols(d.x, d.loss_dep);
    const size_t rows = d.gain_dep.size();

    VarFit fit;
    fit.order = order;
    fit.gain_eq = g.coef;
    fit.loss_eq = l.coef;
    fit.gain_tstat = g.t_stat;
    fit.loss_tstat = l.t_stat;
    fit.gain_r2 = g.r_squared;
    fit.loss_r2 = l.r_squared;
    fit.n_used = rows;
    fit.sic = var_sic(g, l, rows, order);
    double s11 = 0.0, s22 = 0.0, s12 = 0.0;
    for (size_t i = 0; i < rows; ++i) {
        s11 += g.residuals[i] * g.residuals[i];
        s22 += l.residuals[i] * l.residuals[i];
        s12 += g.residuals[i] * l.residuals[i];
    }
    fit.resid_cov[0][0] = s11 / rows;
    fit.resid_cov[1][1] = s22 / rows;
    fit.resid_cov[0][1] = fit.resid_cov[1][0] = s12 / rows;
    fit.gain_fitted = g.fitted;
    fit.loss_fitted = l.fitted;
    return fit;
}

VarFit fit_var(std::span<const double> gain, std::span<const double> loss, int q_max) {
    if (q_max < 1) throw NumericError("fit_var: q_max must be >= 1");
    const size_t n = gain.size();
    if (n <= static_cast<size_t>(10 * q_max)) throw NumericError("fit_var: series too short for q_max");

    // Compare SIC on the sample aligned at q_max for every candidate order.
    int best_order = 1;
    double best_sic = std::numeric_limits<double>::infinity();
    for (int q = 1; q <= q_max; ++q) {
        VarDesign d = build_design(gain, loss, q, static_cast<size_t>(q_max));
        LeastSquares g = ols(d.x, d.gain_dep);
        LeastSquares l = ols(d.x, d.loss_dep);
        double sic = var_sic(g, l, d.gain_dep.size(), q);
        if (sic < best_sic - 1e-12) {
            best_sic = sic;
            best_order = q;
        }
    }
    return fit_var_order(gain, loss, best_order);
}

void var_one_step(const VarFit& fit, std::span<const double> recent_gain,
                  std::span<const double> recent_loss, double& gain_hat, double& loss_hat) {
    const int q = fit.order;
    if (recent_gain.size() < static_cast<size_t>(q) || recent_loss.size() < static_cast<size_t>(q))
        throw NumericError("var_one_step: need q recent observations");
    gain_hat = fit.gain_eq[0];
    loss_hat = fit.loss_eq[0];
    for (int i = 1; i <= q; ++i) {
        gain_hat += fit.gain_eq[i] * recent_gain[i - 1] + fit.gain_eq[q + i] * recent_loss[i - 1];
        loss_hat += fit.loss_eq[i] * recent_gain[i - 1] + fit.loss_eq[q + i] * recent_loss[i - 1];
    }
}

InSampleForecast in_sample_return_forecast(const VarFit& fit, std::span<const double> gain,
                                           std::span<const double> loss) {
    InSampleForecast out;
    out.start = static_cast<size_t>(fit.order);
    const size_t rows = fit.gain_fitted.size();
    if (gain.size() != loss.size() || gain.size() != rows + out.start)
        throw NumericError("in_sample_return_forecast: fit does not match the series");
    out.r_hat.resize(rows);
    double ssr = 0.0, sst = 0.0, rbar = 0.0;
    for (size_t i = 0; i < rows; ++i) rbar += gain[out.start + i] - loss[out.start + i];
    rbar /= static_cast<double>(rows);
    for (size_t i = 0; i < rows; ++i) {
        out.r_hat[i] = fit.gain_fitted[i] - fit.loss_fitted[i];
        double actual = gain[out.start + i] - loss[out.start + i];
        ssr += (actual - out.r_hat[i]) * (actual - out.r_hat[i]);
        sst += (actual - rbar) * (actual - rbar);
    }
    out.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 0.0;
    return out;
}

namespace {

// Joint likelihood of the ARCH-in-Mean model. Parameter vector:
// (delta0, delta1, delta2, log omega0, logit persistence, logit split,
//  logit leverage share or log omega3 depending on the form).
struct AimParams {
    double d0 = 0.0, d1 = 0.0, d2 = 0.0;
    double w0 = 0.0, w1 = 0.0, w2 = 0.0, w3 = 0.0;
};

double aim_loglik(std::span<const double> r, const AimParams& p, LeverageForm lev, double h0,
                  std::vector<double>* h_out) {
    const size_t n = r.size();
    if (!(p.w0 > 0.0) || p.w1 < 0.0 || p.w2 < 0.0 || p.w3 < 0.0) return kNegInf;
    double persistence = p.w1 + p.w2 + (lev == LeverageForm::squared_shock ? 0.5 * p.w3 : 0.0);
    if (persistence >= 1.0) return kNegInf;

    std::vector<double> h(n, h0);
    double loglik = 0.0;
    double e_prev = 0.0;
    double h_prev = h0;
    bool have_prev_shock = false;
    for (size_t t = 1; t < n; ++t) {
        double ht = p.w0 + p.w1 * h_prev;
        if (have_prev_shock) {
            ht += p.w2 * e_prev * e_prev;
            if (e_prev < 0.0)
                ht += lev == LeverageForm::squared_shock ? p.w3 * e_prev * e_prev : p.w3;
        } else {
            ht += p.w2 * h0 + (lev == LeverageForm::squared_shock ? 0.5 * p.w3 * h0 : 0.5 * p.w3);
        }
        if (!(ht > 1e-300) || !std::isfinite(ht)) return kNegInf;
        double e = r[t] - p.d0 - p.d1 * r[t - 1] - p.d2 * std::sqrt(ht);
        loglik -= 0.5 * (kLog2Pi + std::log(ht) + e * e / ht);
        h[t] = ht;
        e_prev = e;
        h_prev = ht;
        have_prev_shock = true;
    }
    if (!std::isfinite(loglik)) return kNegInf;
    if (h_out) *h_out = std::move(h);
    return loglik;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

AimParams aim_unpack(const std::vector<double>& z, LeverageForm lev) {
    AimParams p;
    p.d0 = z[0];
    p.d1 = z[1];
    p.d2 = z[2];
    p.w0 = std::exp(z[3]);
    double s = (1.0 - 1e-6) * sigmoid(z[4]);
    if (lev == LeverageForm::squared_shock) {
        double f1 = sigmoid(z[5]);  // share of persistence on lagged variance
        double f2 = sigmoid(z[6]);  // split of the shock share into symmetric / leverage
        p.w1 = s * f1;
        double shock = s * (1.0 - f1);
        p.w2 = shock * f2;
        p.w3 = 2.0 * shock * (1.0 - f2);
    } else {
        double f1 = sigmoid(z[5]);
        p.w1 = s * f1;
        p.w2 = s * (1.0 - f1);
        p.w3 = std::exp(z[6]);
    }
    return p;
}

}  // namespace

ArchInMeanFit fit_arch_in_mean(std::span<const double> r, bool constant_variance,
                               LeverageForm leverage) {
    const size_t n = r.size();
    ArchInMeanFit fit;
    fit.constant_variance = constant_variance;
    fit.leverage = leverage;

    if (constant_variance) {
        // The volatility-in-mean term is constant and folds into delta0:
        // plain AR(1) least squares.
        if (n < 20) throw DataError("fit_arch_in_mean: series too short");
        Matrix x(n - 1, 2);
        std::vector<double> dep(n - 1);
        for (size_t t = 1; t < n; ++t) {
            x(t - 1, 0) = 1.0;
            x(t - 1, 1) = r[t - 1];
            dep[t - 1] = r[t];
        }
        LeastSquares ls = ols(x, dep);
        fit.delta0 = ls.coef[0];
        fit.delta1 = ls.coef[1];
        fit.delta2 = 0.0;
        fit.omega0 = ls.ssr / static_cast<double>(n - 1);
        fit.r_squared = ls.r_squared;
        fit.cond_variance.assign(n, fit.omega0);
        fit.delta_std_err = {ls.std_err[0], ls.std_err[1], 0.0};
        double ll = 0.0;
        for (size_t i = 0; i < n - 1; ++i)
            ll -= 0.5 * (kLog2Pi + std::log(fit.omega0) + ls.residuals[i] * ls.residuals[i] / fit.omega0);
        fit.log_likelihood = ll;
        return fit;
    }

    if (n < 100) throw DataError("fit_arch_in_mean: need at least 100 observations");
    const double h0 = variance(r);

    auto objective = [&](const std::vector<double>& z) {
        return -aim_loglik(r, aim_unpack(z, leverage), leverage, h0, nullptr);
    };

    // AR(1) start for the mean; mild GARCH start for the variance.
    Matrix x(n - 1, 2);
    std::vector<double> dep(n - 1);
    for (size_t t = 1; t < n; ++t) {
        x(t - 1, 0) = 1.0;
        x(t - 1, 1) = r[t - 1];
        dep[t - 1] = r[t];
    }
    LeastSquares ar1 = ols(x, dep);
    std::vector<double> z0 = {ar1.coef[0], ar1.coef[1], 0.0, std::log(0.1 * h0),
                              std::log(0.9 / 0.1),  // persistence ~0.9
                              std::log(0.85 / 0.15), std::log(0.6 / 0.4)};
    if (leverage == LeverageForm::as_written) z0[6] = std::log(0.05 * h0);

    OptimOptions opt;
    opt.max_iterations = 500;
    opt.rel_tolerance = 1e-8;
    const double start_value = objective(z0);
    OptimResult best = minimize(objective, z0, opt);
    if (std::isfinite(start_value) && best.value > start_value + 1e-9 * std::fabs(start_value))
        throw NumericError("fit_arch_in_mean: optimizer worsened the likelihood");

    AimParams p = aim_unpack(best.x, leverage);
    fit.delta0 = p.d0;
    fit.delta1 = p.d1;
    fit.delta2 = p.d2;
    fit.omega0 = p.w0;
    fit.omega1 = p.w1;
    fit.omega2 = p.w2;
    fit.omega3 = p.w3;
    fit.converged = best.converged;
    fit.log_likelihood = aim_loglik(r, p, leverage, h0, &fit.cond_variance);
    if (!std::isfinite(fit.log_likelihood))
        throw NumericError("fit_arch_in_mean: likelihood not finite at optimum");

    double ssr = 0.0, sst = 0.0;
    double rbar = 0.0;
    for (size_t t = 1; t < n; ++t) rbar += r[t];
    rbar /= static_cast<double>(n - 1);
    for (size_t t = 1; t < n; ++t) {
        double e = r[t] - p.d0 - p.d1 * r[t - 1] - p.d2 * std::sqrt(fit.cond_variance[t]);
        ssr += e * e;
        sst += (r[t] - rbar) * (r[t] - rbar);
    }
    fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 0.0;

    // Inverse-Hessian standard errors for the mean parameters, numerically
    // in the natural (delta) coordinates with the variance terms held fixed.
    auto ll_delta = [&](const std::vector<double>& dz) {
        AimParams q = p;
        q.d0 = dz[0];
        q.d1 = dz[1];
        q.d2 = dz[2];
        return aim_loglik(r, q, leverage, h0, nullptr);
    };
    std::vector<double> d0 = {p.d0, p.d1, p.d2};
    std::vector<double> step(3);
    for (size_t i = 0; i < 3; ++i) step[i] = 1e-4 * std::max(std::fabs(d0[i]), 0.01);
    Matrix neg_hess(3, 3);
    bool ok = true;
    double f0 = fit.log_likelihood;
    std::vector<double> v = d0;
    for (size_t i = 0; i < 3 && ok; ++i) {
        v[i] = d0[i] + step[i];
        double fp = ll_delta(v);
        v[i] = d0[i] - step[i];
        double fm = ll_delta(v);
        v[i] = d0[i];
        if (!std::isfinite(fp) || !std::isfinite(fm)) ok = false;
        neg_hess(i, i) = -(fp - 2.0 * f0 + fm) / (step[i] * step[i]);
        for (size_t j = i + 1; j < 3 && ok; ++j) {
            v[i] = d0[i] + step[i];
            v[j] = d0[j] + step[j];
            double fpp = ll_delta(v);
            v[j] = d0[j] - step[j];
            double fpm = ll_delta(v);
            v[i] = d0[i] - step[i];
            v[j] = d0[j] + step[j];
            double fmp = ll_delta(v);
            v[j] = d0[j] - step[j];
            double fmm = ll_delta(v);
            v[i] = d0[i];
            v[j] = d0[j];
            if (!std::isfinite(fpp) || !std::isfinite(fpm) || !std::isfinite(fmp) ||
                !std::isfinite(fmm))
                ok = false;
            double hij = -(fpp - fpm - fmp + fmm) / (4.0 * step[i] * step[j]);
            neg_hess(i, j) = hij;
            neg_hess(j, i) = hij;
        }
    }
    fit.delta_std_err.assign(3, std::numeric_limits<double>::quiet_NaN());
    if (ok) {
        for (size_t i = 0; i < 3; ++i) {
            std::vector<double> e(3, 0.0);
            e[i] = 1.0;
            if (solve_spd(neg_hess, e) && e[i] > 0.0) fit.delta_std_err[i] = std::sqrt(e[i]);
        }
    }
    return fit;
}

double oos_r_squared(std::span<const double> realized, std::span<const double> mean_forecast,
                     std::span<const double> model_forecast) {
    const size_t n = realized.size();
    if (mean_forecast.size() != n || model_forecast.size() != n || n == 0)
        throw NumericError("oos_r_squared: length mismatch or empty window");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < n; ++i) {
        num += (realized[i] - model_forecast[i]) * (realized[i] - model_forecast[i]);
        den += (realized[i] - mean_forecast[i]) * (realized[i] - mean_forecast[i]);
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return 1.0 - num / den;
}

void clark_west(std::span<const double> realized, std::span<const double> mean_forecast,
                std::span<const double> model_forecast, double& stat, double& p_value) {
    const size_t n = realized.size();
    if (mean_forecast.size() != n || model_forecast.size() != n || n < 2)
        throw NumericError("clark_west: need at least 2 aligned forecasts");
    std::vector<double> f(n);
    for (size_t i = 0; i < n; ++i) {
        double em = realized[i] - mean_forecast[i];
        double ep = realized[i] - model_forecast[i];
        double d = mean_forecast[i] - model_forecast[i];
        f[i] = em * em - (ep * ep - d * d);
    }
    double fbar = mean(f);
    double se = std::sqrt(variance(f) / static_cast<double>(n));
    if (se == 0.0) {
        stat = 0.0;
        p_value = fbar > 0.0 ? 0.0 : 1.0;
        if (fbar == 0.0) p_value = 0.5;
        return;
    }
    stat = fbar / se;
    p_value = 1.0 - normal_cdf(stat);
}

std::vector<double> static_oos_return_forecast(const VarFit& fit, std::span<const double> gain,
                                               std::span<const double> loss, size_t from) {
    const size_t n = gain.size();
    const int q = fit.order;
    if (loss.size() != n) throw NumericError("static_oos_return_forecast: length mismatch");
    if (from < static_cast<size_t>(q) || from > n)
        throw NumericError("static_oos_return_forecast: start index needs q lags of history");
    std::vector<double> out;
    out.reserve(n - from);
    std::vector<double> recent_gain(q), recent_loss(q);
    for (size_t t = from; t < n; ++t) {
        for (int i = 1; i <= q; ++i) {
            recent_gain[i - 1] = gain[t - i];
            recent_loss[i - 1] = loss[t - i];
        }
        double gh = 0.0, lh = 0.0;
        var_one_step(fit, recent_gain, recent_loss, gh, lh);
        out.push_back(gh - lh);
    }
    return out;
}

OosEvaluation evaluate_oos(std::span<const double> gain, std::span<const double> loss,
                           std::span<const double> r, size_t split, int q_max) {
    const size_t n = gain.size();
    if (loss.size() != n || r.size() != n) throw NumericError("evaluate_oos: length mismatch");
    if (split >= n) throw DataError("evaluate_oos: empty evaluation window");
    if (split < 40) throw DataError("evaluate_oos: training window too short");

    std::vector<double> train_gain(gain.begin(), gain.begin() + split);
    std::vector<double> train_loss(loss.begin(), loss.begin() + split);
    VarFit fit = fit_var(train_gain, train_loss, q_max);

    OosEvaluation out;
    out.split = split;
    out.var_order = fit.order;
    out.model_forecast = static_oos_return_forecast(fit, gain, loss, split);
    double run_sum = 0.0;
    for (size_t t = 0; t < split; ++t) run_sum += r[t];
    for (size_t t = split; t < n; ++t) {
        out.mean_forecast.push_back(run_sum / static_cast<double>(t));
        out.realized.push_back(r[t]);
        run_sum += r[t];
    }
    out.r2_oos = oos_r_squared(out.realized, out.mean_forecast, out.model_forecast);
    clark_west(out.realized, out.mean_forecast, out.model_forecast, out.clark_west_stat,
               out.clark_west_p);
    return out;
}

void simulate_var(const VarParams& params, size_t n, Rng& rng, std::vector<double>& gain,
                  std::vector<double>& loss, size_t burn_in) {
    const size_t q = params.gain_on_gain.size();
    if (params.gain_on_loss.size() != q || params.loss_on_gain.size() != q ||
        params.loss_on_loss.size() != q)
        throw ConfigError("simulate_var: lag vectors must share one length");
    const size_t total = n + burn_in;
    std::vector<double> g(total, 0.0), l(total, 0.0);
    const double rho = std::clamp(params.noise_corr, -0.999, 0.999);
    for (size_t t = 0; t < total; ++t) {
        double z1 = rng.normal();
        double z2 = rho * z1 + std::sqrt(1.0 - rho * rho) * rng.normal();
        double gv = params.gain_const + params.noise_gain * z1;
        double lv = params.loss_const + params.noise_loss * z2;
        for (size_t i = 1; i <= q; ++i) {
            if (t >= i) {
                gv += params.gain_on_gain[i - 1] * g[t - i] + params.gain_on_loss[i - 1] * l[t - i];
                lv += params.loss_on_gain[i - 1] * g[t - i] + params.loss_on_loss[i - 1] * l[t - i];
            }
        }
        g[t] = gv;
        l[t] = lv;
    }
    gain.assign(g.begin() + burn_in, g.end());
    loss.assign(l.begin() + burn_in, l.end());
}

}  // namespace pxt
