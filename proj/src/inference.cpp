#include "pxt/inference.hpp"

#include <cmath>

#include "pxt/dist.hpp"
#include "pxt/errors.hpp"

namespace pxt {

GrangerResult granger_test(std::span<const double> x, std::span<const double> y, size_t lag,
                           const std::string& x_name, const std::string& y_name) {
    if (x.size() != y.size()) throw NumericError("granger_test: length mismatch");
    const size_t n = x.size();
    const size_t m = lag;
    if (m == 0) throw NumericError("granger_test: lag must be positive");
    if (n <= 2 * m + 1 + m) throw NumericError("granger_test: series too short for lag " + std::to_string(m));

    const size_t rows = n - m;
    Matrix restricted(rows, m + 1);
    Matrix unrestricted(rows, 2 * m + 1);
    std::vector<double> dep(rows);
    for (size_t t = m; t < n; ++t) {
        const size_t r = t - m;
        dep[r] = y[t];
        restricted(r, 0) = 1.0;
        unrestricted(r, 0) = 1.0;
        for (size_t j = 1; j <= m; ++j) {
            restricted(r, j) = y[t - j];
            unrestricted(r, j) = y[t - j];
            unrestricted(r, m + j) = x[t - j];
        }
    }
    LeastSquares rfit = ols(restricted, dep);
    LeastSquares ufit = ols(unrestricted, dep);

    const double dof2 = static_cast<double>(rows) - (2.0 * m + 1.0);
    double f = ((rfit.ssr - ufit.ssr) / static_cast<double>(m)) / (ufit.ssr / dof2);
    if (f < 0.0 && f > -1e-12) f = 0.0;  // rounding near a zero improvement
    GrangerResult out;
    out.x_name = x_name;
    out.y_name = y_name;
    out.lag = m;
    out.f_stat = f;
    out.p_value = f_sf(f, static_cast<double>(m), dof2);
    out.n_used = rows;
    return out;
}

OlsResult impact_regression(std::span<const double> chi, std::span<const double> psi, size_t lag) {
    if (chi.size() != psi.size()) throw NumericError("impact_regression: length mismatch");
    if (lag == 0) throw NumericError("impact_regression: lag must be >= 1");
    const size_t n = chi.size();
    if (n <= lag + 2) throw NumericError("impact_regression: series too short");
    const size_t rows = n - lag;
    Matrix x(rows, 2);
    std::vector<double> dep(rows);
    for (size_t t = lag; t < n; ++t) {
        x(t - lag, 0) = 1.0;
        x(t - lag, 1) = psi[t - lag];
        dep[t - lag] = chi[t];
    }
    LeastSquares fit = ols(x, dep);
    OlsResult out;
    out.n = rows;
    out.r_squared = fit.r_squared;
    out.terms = {{"const", fit.coef[0], fit.std_err[0], fit.t_stat[0], fit.p_value[0]},
                 {"psi_lag" + std::to_string(lag), fit.coef[1], fit.std_err[1], fit.t_stat[1],
                  fit.p_value[1]}};
    return out;
}

OlsResult control_regression(std::span<const double> gain_f, std::span<const double> loss_f,
                             const std::vector<ControlTerm>& controls,
                             bool include_contemporaneous) {
    if (gain_f.size() != loss_f.size()) throw NumericError("control_regression: length mismatch");
    const size_t n = gain_f.size();
    if (n < 4) throw NumericError("control_regression: series too short");
    for (const auto& c : controls)
        if (c.values.size() != n)
            throw NumericError("control_regression: control '" + c.name + "' not aligned");

    // Row t predicts gain_f[t+1] from loss_f[t], controls at t (and t+1).
    std::vector<size_t> keep;
    for (size_t t = 0; t + 1 < n; ++t) {
        bool ok = std::isfinite(gain_f[t + 1]) && std::isfinite(loss_f[t]);
        for (const auto& c : controls) {
            ok = ok && std::isfinite(c.values[t]);
            if (include_contemporaneous) ok = ok && std::isfinite(c.values[t + 1]);
        }
        if (ok) keep.push_back(t);
    }
    const size_t rows = keep.size();

    // A control that is identically zero on the kept sample carries no
    // information and would only make the design singular; drop it.
    std::vector<const ControlTerm*> active;
    for (const auto& c : controls) {
        bool all_zero = true;
        for (size_t t : keep) {
            if (c.values[t] != 0.0 || (include_contemporaneous && c.values[t + 1] != 0.0)) {
                all_zero = false;
                break;
            }
        }
        if (!all_zero) active.push_back(&c);
    }

    const size_t k = 2 + active.size() * (include_contemporaneous ? 2 : 1);
    if (rows <= k) throw NumericError("control_regression: too few complete rows after alignment");

    Matrix x(rows, k);
    std::vector<double> dep(rows);
    for (size_t r = 0; r < rows; ++r) {
        const size_t t = keep[r];
        dep[r] = gain_f[t + 1];
        x(r, 0) = 1.0;
        x(r, 1) = loss_f[t];
        size_t c = 2;
        for (const ControlTerm* ctrl : active) {
            x(r, c++) = ctrl->values[t];
            if (include_contemporaneous) x(r, c++) = ctrl->values[t + 1];
        }
    }
    LeastSquares fit = ols(x, dep);

    OlsResult out;
    out.n = rows;
    out.dropped = (n - 1) - rows;
    out.r_squared = fit.r_squared;
    out.terms.push_back({"const", fit.coef[0], fit.std_err[0], fit.t_stat[0], fit.p_value[0]});
    out.terms.push_back({"loss_f", fit.coef[1], fit.std_err[1], fit.t_stat[1], fit.p_value[1]});
    size_t c = 2;
    for (const ControlTerm* ctrl : active) {
        out.terms.push_back({ctrl->name, fit.coef[c], fit.std_err[c], fit.t_stat[c], fit.p_value[c]});
        ++c;
        if (include_contemporaneous) {
            out.terms.push_back({ctrl->name + "_next", fit.coef[c], fit.std_err[c], fit.t_stat[c],
                                 fit.p_value[c]});
            ++c;
        }
    }
    return out;
}

}  // namespace pxt
