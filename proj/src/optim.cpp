#include "pxt/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pxt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double guarded(const ObjectiveFn& f, const std::vector<double>& x, int& evals) {
    ++evals;
    double v = f(x);
    return std::isfinite(v) ? v : kInf;
}

}  // namespace

OptimResult nelder_mead(const ObjectiveFn& f, std::vector<double> start, const OptimOptions& opt) {
    const size_t n = start.size();
    OptimResult res;
    if (n == 0) {
        res.x = start;
        res.value = f(start);
        res.converged = true;
        return res;
    }

    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> fv(n + 1);
    for (size_t i = 0; i < n; ++i) {
        double step = opt.initial_step * std::max(1.0, std::fabs(start[i]));
        simplex[i + 1][i] += step;
    }
    for (size_t i = 0; i <= n; ++i) fv[i] = guarded(f, simplex[i], res.evaluations);

    std::vector<size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
        std::iota(order.begin(), order.end(), size_t{0});
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        const size_t best = order[0], worst = order[n], second_worst = order[n - 1];

        double denom = std::fabs(fv[best]) + std::fabs(fv[worst]) + 1e-300;
        if (std::fabs(fv[worst] - fv[best]) / denom < opt.rel_tolerance && std::isfinite(fv[worst])) {
            res.converged = true;
            break;
        }

        for (size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (size_t i = 0; i <= n; ++i)
                if (i != worst) s += simplex[i][j];
            centroid[j] = s / static_cast<double>(n);
        }

        for (size_t j = 0; j < n; ++j) xr[j] = centroid[j] + (centroid[j] - simplex[worst][j]);
        double fr = guarded(f, xr, res.evaluations);

        if (fr < fv[best]) {
            for (size_t j = 0; j < n; ++j) xe[j] = centroid[j] + 2.0 * (centroid[j] - simplex[worst][j]);
            double fe = guarded(f, xe, res.evaluations);
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            simplex[worst] = xr;
            fv[worst] = fr;
        } else {
            bool outside = fr < fv[worst];
            const std::vector<double>& base = outside ? xr : simplex[worst];
            for (size_t j = 0; j < n; ++j) xc[j] = centroid[j] + 0.5 * (base[j] - centroid[j]);
            double fc = guarded(f, xc, res.evaluations);
            if (fc < std::min(fr, fv[worst])) {
                simplex[worst] = xc;
                fv[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
                    fv[i] = guarded(f, simplex[i], res.evaluations);
                }
            }
        }
    }

    size_t best = 0;
    for (size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    res.x = simplex[best];
    res.value = fv[best];
    return res;
}

namespace {

std::vector<double> numeric_gradient(const ObjectiveFn& f, const std::vector<double>& x, int& evals) {
    const size_t n = x.size();
    std::vector<double> g(n), xp = x;
    for (size_t i = 0; i < n; ++i) {
        double h = 1e-6 * std::max(1.0, std::fabs(x[i]));
        xp[i] = x[i] + h;
        double fp = guarded(f, xp, evals);
        xp[i] = x[i] - h;
        double fm = guarded(f, xp, evals);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
        if (!std::isfinite(g[i])) g[i] = 0.0;
    }
    return g;
}

}  // namespace

OptimResult bfgs(const ObjectiveFn& f, std::vector<double> start, const OptimOptions& opt) {
    const size_t n = start.size();
    OptimResult res;
    res.x = start;
    res.value = guarded(f, start, res.evaluations);
    if (n == 0 || !std::isfinite(res.value)) return res;

    // inverse Hessian approximation, identity start
    std::vector<double> hinv(n * n, 0.0);
    for (size_t i = 0; i < n; ++i) hinv[i * n + i] = 1.0;

    std::vector<double> g = numeric_gradient(f, res.x, res.evaluations);
    std::vector<double> dir(n), xn(n), gn(n), s(n), yv(n), hy(n);

    for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
        for (size_t i = 0; i < n; ++i) {
            double d = 0.0;
            for (size_t j = 0; j < n; ++j) d -= hinv[i * n + j] * g[j];
            dir[i] = d;
        }
        double slope = 0.0;
        for (size_t i = 0; i < n; ++i) slope += dir[i] * g[i];
        if (slope >= 0.0) {  // not a descent direction; reset to steepest descent
            for (size_t i = 0; i < n; ++i) dir[i] = -g[i];
            slope = 0.0;
            for (size_t i = 0; i < n; ++i) slope += dir[i] * g[i];
            if (slope >= 0.0) {
                res.converged = true;
                break;
            }
        }

        double step = 1.0;
        double fn = kInf;
        for (int ls = 0; ls < 40; ++ls) {
            for (size_t i = 0; i < n; ++i) xn[i] = res.x[i] + step * dir[i];
            fn = guarded(f, xn, res.evaluations);
            if (fn <= res.value + 1e-4 * step * slope) break;
            step *= 0.5;
        }
        if (!(fn < res.value)) {
            res.converged = true;
            break;
        }

        gn = numeric_gradient(f, xn, res.evaluations);
        double sy = 0.0;
        for (size_t i = 0; i < n; ++i) {
            s[i] = xn[i] - res.x[i];
            yv[i] = gn[i] - g[i];
            sy += s[i] * yv[i];
        }
        double rel_change = std::fabs(res.value - fn) / (std::fabs(res.value) + 1e-300);
        res.x = xn;
        res.value = fn;
        g = gn;
        if (rel_change < opt.rel_tolerance) {
            res.converged = true;
            break;
        }
        if (sy > 1e-12) {  // BFGS update
            double yhy = 0.0;
            for (size_t i = 0; i < n; ++i) {
                double t = 0.0;
                for (size_t j = 0; j < n; ++j) t += hinv[i * n + j] * yv[j];
                hy[i] = t;
                yhy += yv[i] * t;
            }
            double c1 = (sy + yhy) / (sy * sy);
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j)
                    hinv[i * n + j] += c1 * s[i] * s[j] - (hy[i] * s[j] + s[i] * hy[j]) / sy;
        }
    }
    return res;
}

OptimResult minimize(const ObjectiveFn& f, std::vector<double> start, const OptimOptions& opt) {
    OptimResult coarse = nelder_mead(f, std::move(start), opt);
    OptimResult fine = bfgs(f, coarse.x, opt);
    fine.evaluations += coarse.evaluations;
    fine.iterations += coarse.iterations;
    if (coarse.value < fine.value) {
        fine.x = coarse.x;
        fine.value = coarse.value;
        fine.converged = coarse.converged;
    } else {
        fine.converged = fine.converged || coarse.converged;
    }
    return fine;
}

}  // namespace pxt
