#include "pxt/arma_garch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pxt/errors.hpp"
#include "pxt/linalg.hpp"
#include "pxt/optim.hpp"
#include "pxt/stats.hpp"

namespace pxt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kMaxPersistence = 1.0 - 1e-6;

struct Params {
    double mu = 0.0;
    std::vector<double> phi;
    std::vector<double> theta;
    double omega = 1.0;
    std::vector<double> garch;
    std::vector<double> arch;
};

bool ar_stationary(const std::vector<double>& phi) {
    if (phi.empty()) return true;
    if (phi.size() == 1) return std::fabs(phi[0]) < 1.0;
    // AR(2) triangle: phi2 + phi1 < 1, phi2 - phi1 < 1, |phi2| < 1
    return phi[1] + phi[0] < 1.0 && phi[1] - phi[0] < 1.0 && std::fabs(phi[1]) < 1.0;
}

bool variance_valid(const Params& p) {
    if (!(p.omega > 0.0)) return false;
    double s = 0.0;
    for (double g : p.garch) {
        if (g < 0.0) return false;
        s += g;
    }
    for (double a : p.arch) {
        if (a < 0.0) return false;
        s += a;
    }
    return s < 1.0;
}

// Conditional recursions. Pre-sample mean deviations and shocks are zero;
// pre-sample h and u^2 equal h0.
double evaluate(std::span<const double> y, const Params& p, double h0, std::vector<double>* u_out,
                std::vector<double>* h_out) {
    const size_t n = y.size();
    const int l = static_cast<int>(p.phi.size());
    const int m = static_cast<int>(p.theta.size());
    const int gp = static_cast<int>(p.garch.size());
    const int aq = static_cast<int>(p.arch.size());

    if (!ar_stationary(p.phi) || !variance_valid(p)) return kNegInf;

    std::vector<double> u(n, 0.0), h(n, 0.0);
    double loglik = 0.0;
    for (size_t t = 0; t < n; ++t) {
        double mean_dev = 0.0;
        for (int i = 1; i <= l; ++i)
            if (t >= static_cast<size_t>(i)) mean_dev += p.phi[i - 1] * (y[t - i] - p.mu);
        for (int j = 1; j <= m; ++j)
            if (t >= static_cast<size_t>(j)) mean_dev += p.theta[j - 1] * u[t - j];
        u[t] = (y[t] - p.mu) - mean_dev;

        double ht = p.omega;
        for (int i = 1; i <= gp; ++i)
            ht += p.garch[i - 1] * (t >= static_cast<size_t>(i) ? h[t - i] : h0);
        for (int j = 1; j <= aq; ++j)
            ht += p.arch[j - 1] * (t >= static_cast<size_t>(j) ? u[t - j] * u[t - j] : h0);
        if (!(ht > 1e-300) || !std::isfinite(ht)) return kNegInf;
        h[t] = ht;
        loglik -= 0.5 * (kLog2Pi + std::log(ht) + u[t] * u[t] / ht);
    }
    if (!std::isfinite(loglik)) return kNegInf;
    if (u_out) *u_out = std::move(u);
    if (h_out) *h_out = std::move(h);
    return loglik;
}

Params unpack_natural(const ArmaGarchSpec& spec, std::span<const double> nat) {
    Params p;
    size_t k = 0;
    p.mu = nat[k++];
    for (int i = 0; i < spec.ar; ++i) p.phi.push_back(nat[k++]);
    for (int j = 0; j < spec.ma; ++j) p.theta.push_back(nat[k++]);
    p.omega = nat[k++];
    for (int i = 0; i < spec.garch; ++i) p.garch.push_back(nat[k++]);
    for (int j = 0; j < spec.arch; ++j) p.arch.push_back(nat[k++]);
    return p;
}

// Optimizer coordinates: mu raw, AR through the partial-autocorrelation
// tanh map (keeps the roots outside the unit circle), MA raw, log omega,
// and a logit persistence/split pair for the variance coefficients.
std::vector<double> ar_from_pacf(const std::vector<double>& r) {
    if (r.empty()) return {};
    if (r.size() == 1) return {r[0]};
    return {r[0] * (1.0 - r[1]), r[1]};
}

std::vector<double> pacf_from_ar(const std::vector<double>& phi) {
    if (phi.empty()) return {};
    auto clamp = [](double v) { return std::clamp(v, -0.98, 0.98); };
    if (phi.size() == 1) return {clamp(phi[0])};
    double r2 = clamp(phi[1]);
    double r1 = clamp(phi[0] / std::max(1.0 - r2, 1e-6));
    return {r1, r2};
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

Params unpack_transformed(const ArmaGarchSpec& spec, const std::vector<double>& z) {
    Params p;
    size_t k = 0;
    p.mu = z[k++];
    std::vector<double> r;
    for (int i = 0; i < spec.ar; ++i) r.push_back(std::tanh(z[k++]));
    p.phi = ar_from_pacf(r);
    for (int j = 0; j < spec.ma; ++j) p.theta.push_back(z[k++]);
    p.omega = std::exp(z[k++]);
    if (!spec.constant_variance()) {
        double s = kMaxPersistence * sigmoid(z[k++]);
        double f = sigmoid(z[k++]);
        p.garch.push_back(s * f);
        p.arch.push_back(s * (1.0 - f));
    }
    return p;
}

std::vector<double> pack_transformed(const ArmaGarchSpec& spec, const Params& p) {
    std::vector<double> z;
    z.push_back(p.mu);
    for (double r : pacf_from_ar(p.phi)) z.push_back(std::atanh(r));
    for (double t : p.theta) z.push_back(t);
    z.push_back(std::log(std::max(p.omega, 1e-12)));
    if (!spec.constant_variance()) {
        double s = std::clamp(p.garch[0] + p.arch[0], 1e-4, kMaxPersistence * (1.0 - 1e-7));
        double f = std::clamp(p.garch[0] / s, 1e-4, 1.0 - 1e-4);
        z.push_back(logit(s / kMaxPersistence));
        z.push_back(logit(f));
    }
    return z;
}

// Hannan-Rissanen style starting values on the demeaned series; also yields
// the pre-sample variance used throughout the likelihood.
struct StartingPoint {
    Params params;
    double presample_variance = 0.0;
};

StartingPoint starting_point(std::span<const double> y, const ArmaGarchSpec& spec) {
    const size_t n = y.size();
    StartingPoint sp;
    sp.params.mu = mean(y);
    std::vector<double> dev(n);
    for (size_t t = 0; t < n; ++t) dev[t] = y[t] - sp.params.mu;

    std::vector<double> resid = dev;
    if (spec.ar + spec.ma > 0) {
        const size_t k_long = std::min<size_t>(n / 10, std::max<size_t>(spec.ar + spec.ma + 2, 4));
        Matrix xa(n - k_long, k_long);
        std::vector<double> ya(n - k_long);
        for (size_t t = k_long; t < n; ++t) {
            ya[t - k_long] = dev[t];
            for (size_t i = 1; i <= k_long; ++i) xa(t - k_long, i - 1) = dev[t - i];
        }
        std::vector<double> e(n, 0.0);
        try {
            LeastSquares ar_fit = ols(xa, ya);
            for (size_t t = k_long; t < n; ++t) e[t] = ar_fit.residuals[t - k_long];
        } catch (const NumericError&) {
            // keep zero innovations; the second stage degrades to pure AR
        }
        const size_t k0 = static_cast<size_t>(std::max(spec.ar, spec.ma));
        Matrix xb(n - k0, spec.ar + spec.ma);
        std::vector<double> yb(n - k0);
        for (size_t t = k0; t < n; ++t) {
            yb[t - k0] = dev[t];
            size_t c = 0;
            for (int i = 1; i <= spec.ar; ++i) xb(t - k0, c++) = dev[t - i];
            for (int j = 1; j <= spec.ma; ++j) xb(t - k0, c++) = e[t - j];
        }
        try {
            LeastSquares hr = ols(xb, yb);
            for (int i = 0; i < spec.ar; ++i) sp.params.phi.push_back(hr.coef[i]);
            for (int j = 0; j < spec.ma; ++j)
                sp.params.theta.push_back(std::clamp(hr.coef[spec.ar + j], -0.95, 0.95));
            resid = std::vector<double>(n, 0.0);
            for (size_t t = k0; t < n; ++t) resid[t] = hr.residuals[t - k0];
            for (size_t t = 0; t < k0; ++t) resid[t] = dev[t];
        } catch (const NumericError&) {
            sp.params.phi.assign(spec.ar, 0.0);
            sp.params.theta.assign(spec.ma, 0.0);
        }
        sp.params.phi = ar_from_pacf(pacf_from_ar(sp.params.phi));  // force stationary
    }

    double v0 = 0.0;
    for (double e : resid) v0 += e * e;
    v0 /= static_cast<double>(n);
    if (!(v0 > 0.0)) v0 = variance(y) > 0 ? variance(y) : 1e-8;
    sp.presample_variance = v0;

    if (spec.constant_variance()) {
        sp.params.omega = v0;
    } else {
        sp.params.omega = 0.1 * v0;
        sp.params.garch.assign(spec.garch, 0.85);
        sp.params.arch.assign(spec.arch, 0.05);
    }
    return sp;
}

}  // namespace

std::string ArmaGarchSpec::label() const {
    std::string s = "arma(" + std::to_string(ar) + "," + std::to_string(ma) + ")";
    if (!constant_variance())
        s += "-garch(" + std::to_string(garch) + "," + std::to_string(arch) + ")";
    return s;
}

void validate_spec(const ArmaGarchSpec& spec) {
    if (spec.ar < 0 || spec.ar > 2 || spec.ma < 0 || spec.ma > 2)
        throw ConfigError("arma orders must lie in 0..2");
    if (!((spec.garch == 0 && spec.arch == 0) || (spec.garch == 1 && spec.arch == 1)))
        throw ConfigError("variance orders must be jointly 0 or jointly 1");
}

const char* to_string(FitStatus s) {
    switch (s) {
        case FitStatus::converged: return "converged";
        case FitStatus::max_iterations: return "max_iterations";
        case FitStatus::boundary: return "boundary";
    }
    return "?";
}

std::vector<double> ArmaGarchFit::natural_parameters() const {
    std::vector<double> nat;
    nat.push_back(mu);
    nat.insert(nat.end(), ar_coef.begin(), ar_coef.end());
    nat.insert(nat.end(), ma_coef.begin(), ma_coef.end());
    nat.push_back(omega);
    nat.insert(nat.end(), garch_coef.begin(), garch_coef.end());
    nat.insert(nat.end(), arch_coef.begin(), arch_coef.end());
    return nat;
}

std::vector<double> sqrt_transform(std::span<const double> x) {
    std::vector<double> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0.0) throw DataError("sqrt_transform: negative input at index " + std::to_string(i));
        out[i] = std::sqrt(x[i]);
    }
    return out;
}

double arma_garch_loglik(std::span<const double> y, const ArmaGarchSpec& spec,
                         std::span<const double> natural, double presample_variance) {
    Params p = unpack_natural(spec, natural);
    return evaluate(y, p, presample_variance, nullptr, nullptr);
}

double fitted_presample_variance(const ArmaGarchFit& fit, std::span<const double> y) {
    // Recover the h0 the fit used: re-derive the preliminary pass.
    return starting_point(y, fit.spec).presample_variance;
}

ArmaGarchFit fit_arma_garch(std::span<const double> y, const ArmaGarchSpec& spec) {
    validate_spec(spec);
    const size_t n = y.size();
    if (n < 50) throw DataError("fit_arma_garch: need at least 50 observations");

    StartingPoint sp = starting_point(y, spec);
    const double h0 = sp.presample_variance;

    auto objective = [&](const std::vector<double>& z) {
        Params p = unpack_transformed(spec, z);
        return -evaluate(y, p, h0, nullptr, nullptr);
    };

    OptimOptions opt;
    opt.max_iterations = 500;
    opt.rel_tolerance = 1e-8;
    std::vector<double> start = pack_transformed(spec, sp.params);
    const double start_value = objective(start);
    OptimResult best = minimize(objective, std::move(start), opt);
    if (std::isfinite(start_value) && best.value > start_value + 1e-9 * std::fabs(start_value))
        throw NumericError("fit_arma_garch: optimizer worsened the likelihood for " + spec.label());

    ArmaGarchFit fit;
    fit.spec = spec;
    Params p = unpack_transformed(spec, best.x);
    fit.mu = p.mu;
    fit.ar_coef = p.phi;
    fit.ma_coef = p.theta;
    fit.omega = p.omega;
    fit.garch_coef = p.garch;
    fit.arch_coef = p.arch;

    fit.log_likelihood = evaluate(y, p, h0, &fit.residuals, &fit.cond_variance);
    if (!std::isfinite(fit.log_likelihood))
        throw NumericError("fit_arma_garch: likelihood not finite at optimum for " + spec.label());
    fit.aic = -2.0 * fit.log_likelihood + 2.0 * spec.free_parameters();

    double sst = 0.0, ssr = 0.0;
    double ybar = mean(y);
    for (size_t t = 0; t < n; ++t) {
        sst += (y[t] - ybar) * (y[t] - ybar);
        ssr += fit.residuals[t] * fit.residuals[t];
    }
    fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 0.0;

    fit.std_residuals.resize(n);
    for (size_t t = 0; t < n; ++t) fit.std_residuals[t] = fit.residuals[t] / std::sqrt(fit.cond_variance[t]);

    fit.status = best.converged ? FitStatus::converged : FitStatus::max_iterations;
    double persistence = 0.0;
    for (double g : p.garch) persistence += g;
    for (double a : p.arch) persistence += a;
    bool near_unit_root = false;
    for (double r : pacf_from_ar(p.phi))
        if (std::fabs(r) > 0.9999) near_unit_root = true;
    if (persistence > 0.999 || near_unit_root) fit.status = FitStatus::boundary;

    // Plain inverse-Hessian standard errors on the natural parameters.
    std::vector<double> nat = fit.natural_parameters();
    const size_t np = nat.size();
    fit.std_errors.assign(np, kNan);
    auto ll = [&](const std::vector<double>& v) {
        return arma_garch_loglik(y, spec, v, h0);
    };
    std::vector<double> step(np);
    for (size_t i = 0; i < np; ++i) step[i] = 1e-4 * std::max(std::fabs(nat[i]), 0.01);
    Matrix neg_hess(np, np);
    bool hess_ok = true;
    double f0 = fit.log_likelihood;
    std::vector<double> v = nat;
    for (size_t i = 0; i < np && hess_ok; ++i) {
        v[i] = nat[i] + step[i];
        double fp = ll(v);
        v[i] = nat[i] - step[i];
        double fm = ll(v);
        v[i] = nat[i];
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            hess_ok = false;
            break;
        }
        neg_hess(i, i) = -(fp - 2.0 * f0 + fm) / (step[i] * step[i]);
        for (size_t j = i + 1; j < np && hess_ok; ++j) {
            v[i] = nat[i] + step[i];
            v[j] = nat[j] + step[j];
            double fpp = ll(v);
            v[j] = nat[j] - step[j];
            double fpm = ll(v);
            v[i] = nat[i] - step[i];
            v[j] = nat[j] + step[j];
            double fmp = ll(v);
            v[j] = nat[j] - step[j];
            double fmm = ll(v);
            v[i] = nat[i];
            v[j] = nat[j];
            if (!std::isfinite(fpp) || !std::isfinite(fpm) || !std::isfinite(fmp) || !std::isfinite(fmm)) {
                hess_ok = false;
                break;
            }
            double hij = -(fpp - fpm - fmp + fmm) / (4.0 * step[i] * step[j]);
            neg_hess(i, j) = hij;
            neg_hess(j, i) = hij;
        }
    }
    if (hess_ok) {
        for (size_t i = 0; i < np; ++i) {
            std::vector<double> e(np, 0.0);
            e[i] = 1.0;
            if (solve_spd(neg_hess, e) && e[i] > 0.0)
                fit.std_errors[i] = std::sqrt(e[i]);
            else
                fit.std_errors[i] = kNan;
        }
    }
    return fit;
}

std::vector<ArmaGarchSpec> default_spec_grid() {
    std::vector<ArmaGarchSpec> grid;
    for (int l = 1; l <= 2; ++l)
        for (int m = 0; m <= 2; ++m)
            for (int v = 0; v <= 1; ++v) grid.push_back({l, m, v, v});
    return grid;
}

ArmaGarchFit select_arma_garch(std::span<const double> y, const std::vector<ArmaGarchSpec>& grid) {
    if (grid.empty()) throw ConfigError("select_arma_garch: empty grid");
    bool have_best = false;
    ArmaGarchFit best;
    auto better = [](const ArmaGarchFit& a, const ArmaGarchFit& b) {
        if (std::fabs(a.aic - b.aic) > 1e-9) return a.aic < b.aic;
        if (a.spec.free_parameters() != b.spec.free_parameters())
            return a.spec.free_parameters() < b.spec.free_parameters();
        auto ka = std::tuple(a.spec.ar, a.spec.ma, a.spec.garch, a.spec.arch);
        auto kb = std::tuple(b.spec.ar, b.spec.ma, b.spec.garch, b.spec.arch);
        return ka < kb;
    };
    for (const auto& spec : grid) {
        ArmaGarchFit fit;
        try {
            fit = fit_arma_garch(y, spec);
        } catch (const Error&) {
            continue;
        }
        if (fit.status != FitStatus::converged) continue;
        if (!have_best || better(fit, best)) {
            best = std::move(fit);
            have_best = true;
        }
    }
    if (!have_best) throw NumericError("select_arma_garch: no specification converged");
    return best;
}

std::vector<double> filtered_series(const ArmaGarchFit& fit) {
    return standardize(fit.std_residuals);
}

std::vector<double> simulate_arma_garch(const ArmaGarchParams& params, size_t n, Rng& rng,
                                        size_t burn_in) {
    const size_t total = n + burn_in;
    const int l = static_cast<int>(params.ar_coef.size());
    const int m = static_cast<int>(params.ma_coef.size());
    const int gp = static_cast<int>(params.garch_coef.size());
    const int aq = static_cast<int>(params.arch_coef.size());
    double persistence = 0.0;
    for (double g : params.garch_coef) persistence += g;
    for (double a : params.arch_coef) persistence += a;
    if (persistence >= 1.0) throw ConfigError("simulate_arma_garch: variance not stationary");
    const double h_uncond = params.omega / (1.0 - persistence);

    std::vector<double> dev(total, 0.0), u(total, 0.0), h(total, h_uncond);
    for (size_t t = 0; t < total; ++t) {
        double ht = params.omega;
        for (int i = 1; i <= gp; ++i)
            ht += params.garch_coef[i - 1] * (t >= static_cast<size_t>(i) ? h[t - i] : h_uncond);
        for (int j = 1; j <= aq; ++j)
            ht += params.arch_coef[j - 1] * (t >= static_cast<size_t>(j) ? u[t - j] * u[t - j] : h_uncond);
        h[t] = ht;
        u[t] = std::sqrt(ht) * rng.normal();
        double d = u[t];
        for (int i = 1; i <= l; ++i)
            if (t >= static_cast<size_t>(i)) d += params.ar_coef[i - 1] * dev[t - i];
        for (int j = 1; j <= m; ++j)
            if (t >= static_cast<size_t>(j)) d += params.ma_coef[j - 1] * u[t - j];
        dev[t] = d;
    }
    std::vector<double> y(n);
    for (size_t t = 0; t < n; ++t) y[t] = params.mu + dev[burn_in + t];
    return y;
}

}  // namespace pxt
