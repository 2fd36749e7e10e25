#include "pxt/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pxt/dist.hpp"
#include "pxt/errors.hpp"

namespace pxt {

LeastSquares ols(const Matrix& x, const std::vector<double>& y) {
    const size_t n = x.rows();
    const size_t k = x.cols();
    if (y.size() != n) throw NumericError("ols: X and y row counts differ");
    if (n <= k) throw NumericError("ols: need more observations than regressors");

    // Householder QR of X, applying the reflections to a copy of y in place.
    Matrix r = x;
    std::vector<double> qty = y;
    for (size_t j = 0; j < k; ++j) {
        double norm = 0.0;
        for (size_t i = j; i < n; ++i) norm += r(i, j) * r(i, j);
        norm = std::sqrt(norm);
        if (norm == 0.0) throw NumericError("ols: singular design matrix (zero column " + std::to_string(j) + ")");
        if (r(j, j) < 0.0) norm = -norm;  // keep the pivot's sign so v_j >= 1
        for (size_t i = j; i < n; ++i) r(i, j) /= norm;
        r(j, j) += 1.0;
        for (size_t c = j + 1; c < k; ++c) {
            double s = 0.0;
            for (size_t i = j; i < n; ++i) s += r(i, j) * r(i, c);
            s = -s / r(j, j);
            for (size_t i = j; i < n; ++i) r(i, c) += s * r(i, j);
        }
        double s = 0.0;
        for (size_t i = j; i < n; ++i) s += r(i, j) * qty[i];
        s = -s / r(j, j);
        for (size_t i = j; i < n; ++i) qty[i] += s * r(i, j);
        r(j, j) = -norm;  // diagonal of R
    }

    double dmax = 0.0, dmin = 0.0;
    for (size_t j = 0; j < k; ++j) {
        double a = std::fabs(r(j, j));
        dmax = std::max(dmax, a);
        dmin = (j == 0) ? a : std::min(dmin, a);
    }
    double condition = (dmin > 0.0) ? dmax / dmin : std::numeric_limits<double>::infinity();
    if (!(dmin > dmax * 1e-12)) {
        throw NumericError("ols: singular design matrix (R diagonal ratio " +
                           std::to_string(dmax > 0 ? dmin / dmax : 0.0) + ", condition ~" +
                           std::to_string(condition) + ")");
    }

    LeastSquares out;
    out.n = n;
    out.k = k;
    out.condition = condition;
    out.coef.assign(k, 0.0);
    for (size_t j = k; j-- > 0;) {
        double s = qty[j];
        for (size_t c = j + 1; c < k; ++c) s -= r(j, c) * out.coef[c];
        out.coef[j] = s / r(j, j);
    }

    out.fitted.assign(n, 0.0);
    out.residuals.assign(n, 0.0);
    double ybar = 0.0;
    for (size_t i = 0; i < n; ++i) ybar += y[i];
    ybar /= static_cast<double>(n);
    double sst = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double f = 0.0;
        for (size_t j = 0; j < k; ++j) f += x(i, j) * out.coef[j];
        out.fitted[i] = f;
        out.residuals[i] = y[i] - f;
        out.ssr += out.residuals[i] * out.residuals[i];
        sst += (y[i] - ybar) * (y[i] - ybar);
    }
    out.r_squared = sst > 0.0 ? 1.0 - out.ssr / sst : 0.0;
    out.sigma2 = out.ssr / static_cast<double>(n - k);

    // (X'X)^-1 = R^-1 R^-T; column-by-column back substitution.
    Matrix rinv(k, k);
    for (size_t c = 0; c < k; ++c) {
        for (size_t j = k; j-- > 0;) {
            double s = (j == c) ? 1.0 : 0.0;
            for (size_t l = j + 1; l < k; ++l) s -= r(j, l) * rinv(l, c);
            rinv(j, c) = s / r(j, j);
        }
    }
    out.std_err.assign(k, 0.0);
    out.t_stat.assign(k, 0.0);
    out.p_value.assign(k, 0.0);
    const double dof = static_cast<double>(n - k);
    for (size_t j = 0; j < k; ++j) {
        double xtx_jj = 0.0;
        for (size_t c = j; c < k; ++c) xtx_jj += rinv(j, c) * rinv(j, c);
        out.std_err[j] = std::sqrt(out.sigma2 * xtx_jj);
        out.t_stat[j] = out.std_err[j] > 0.0 ? out.coef[j] / out.std_err[j]
                                             : std::numeric_limits<double>::quiet_NaN();
        out.p_value[j] = student_t_two_sided(out.t_stat[j], dof);
    }
    return out;
}

bool solve_spd(Matrix a, std::vector<double>& rhs) {
    const size_t n = a.rows();
    if (a.cols() != n || rhs.size() != n) return false;
    // Cholesky A = L L'
    for (size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (size_t p = 0; p < j; ++p) d -= a(j, p) * a(j, p);
        if (!(d > 0.0)) return false;
        d = std::sqrt(d);
        a(j, j) = d;
        for (size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (size_t p = 0; p < j; ++p) s -= a(i, p) * a(j, p);
            a(i, j) = s / d;
        }
    }
    for (size_t i = 0; i < n; ++i) {
        double s = rhs[i];
        for (size_t p = 0; p < i; ++p) s -= a(i, p) * rhs[p];
        rhs[i] = s / a(i, i);
    }
    for (size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (size_t p = i + 1; p < n; ++p) s -= a(p, i) * rhs[p];
        rhs[i] = s / a(i, i);
    }
    return true;
}

}  // namespace pxt
