#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pxt/dist.hpp"
#include "pxt/errors.hpp"
#include "pxt/rng.hpp"
#include "pxt/var_forecast.hpp"

using namespace pxt;

namespace {

void make_var1_data(uint64_t seed, size_t n, std::vector<double>& gain, std::vector<double>& loss) {
    VarParams p;
    p.gain_const = 0.01;
    p.loss_const = 0.012;
    p.gain_on_gain = {0.3};
    p.gain_on_loss = {0.2};
    p.loss_on_gain = {0.1};
    p.loss_on_loss = {0.25};
    p.noise_gain = 0.02;
    p.noise_loss = 0.025;
    p.noise_corr = 0.2;
    Rng rng(seed);
    simulate_var(p, n, rng, gain, loss);
}

}  // namespace

TEST_CASE("per-equation VAR estimates match the normal-equations oracle") {
    std::vector<double> gain, loss;
    make_var1_data(321, 400, gain, loss);
    VarFit fit = fit_var_order(gain, loss, 2);

    std::vector<std::vector<double>> x;
    std::vector<double> yg, yl;
    for (size_t t = 2; t < gain.size(); ++t) {
        x.push_back({1.0, gain[t - 1], gain[t - 2], loss[t - 1], loss[t - 2]});
        yg.push_back(gain[t]);
        yl.push_back(loss[t]);
    }
    oracle::Ols og = oracle::ols(x, yg);
    oracle::Ols ol = oracle::ols(x, yl);
    // library layout: const, gain lags, loss lags — same as the oracle design
    for (size_t j = 0; j < 5; ++j) {
        CHECK(fit.gain_eq[j] == doctest::Approx(og.coef[j]).epsilon(1e-8));
        CHECK(fit.loss_eq[j] == doctest::Approx(ol.coef[j]).epsilon(1e-8));
    }
    CHECK(fit.gain_r2 == doctest::Approx(og.r_squared).epsilon(1e-8));
}

TEST_CASE("simulated VAR(1) is recovered and SIC picks order one") {
    std::vector<double> gain, loss;
    make_var1_data(17, 5000, gain, loss);
    VarFit fit = fit_var(gain, loss, 4);
    CHECK(fit.order == 1);
    CHECK(fit.gain_eq[1] == doctest::Approx(0.3).epsilon(0.2));
    CHECK(std::fabs(fit.gain_eq[1] - 0.3) <= 0.05);
    CHECK(std::fabs(fit.gain_eq[2] - 0.2) <= 0.05);
    CHECK(std::fabs(fit.loss_eq[1] - 0.1) <= 0.05);
    CHECK(std::fabs(fit.loss_eq[2] - 0.25) <= 0.05);
}

TEST_CASE("one-step forecasts match hand matrix multiplication") {
    VarFit fit;
    fit.order = 1;
    fit.gain_eq = {0.01, 0.5, 0.2};   // const, gain lag, loss lag
    fit.loss_eq = {0.02, -0.1, 0.3};
    double gh = 0.0, lh = 0.0;
    std::vector<double> rg = {0.04}, rl = {0.03};
    var_one_step(fit, rg, rl, gh, lh);
    CHECK(gh == doctest::Approx(0.01 + 0.5 * 0.04 + 0.2 * 0.03).epsilon(1e-15));
    CHECK(lh == doctest::Approx(0.02 - 0.1 * 0.04 + 0.3 * 0.03).epsilon(1e-15));
}

TEST_CASE("constants-only VAR forecasts a constant return") {
    VarFit fit;
    fit.order = 1;
    fit.gain_eq = {0.03, 0.0, 0.0};
    fit.loss_eq = {0.012, 0.0, 0.0};
    double gh = 0.0, lh = 0.0;
    std::vector<double> rg = {0.5}, rl = {-0.2};
    var_one_step(fit, rg, rl, gh, lh);
    CHECK(gh - lh == doctest::Approx(0.03 - 0.012).epsilon(1e-15));
}

TEST_CASE("oos evaluation degenerate cases") {
    // identical forecasts: r2 exactly zero, every f zero
    std::vector<double> realized = {0.01, -0.02, 0.03, 0.005};
    std::vector<double> same = {0.002, 0.004, 0.001, 0.003};
    CHECK(oos_r_squared(realized, same, same) == 0.0);
    double stat = 0.0, p = 1.0;
    clark_west(realized, same, same, stat, p);
    CHECK(stat == 0.0);
    CHECK(p == 0.5);

    // perfect foresight: r2 is one
    CHECK(oos_r_squared(realized, same, realized) == 1.0);
}

TEST_CASE("oos r-squared is invariant to a common additive shift") {
    Rng rng(9);
    std::vector<double> r(50), rm(50), rp(50);
    for (size_t i = 0; i < 50; ++i) {
        r[i] = rng.normal();
        rm[i] = 0.2 * rng.normal();
        rp[i] = r[i] * 0.3 + 0.1 * rng.normal();
    }
    double base = oos_r_squared(r, rm, rp);
    std::vector<double> r2(r), rm2(rm), rp2(rp);
    for (size_t i = 0; i < 50; ++i) {
        r2[i] += 0.37;
        rm2[i] += 0.37;
        rp2[i] += 0.37;
    }
    CHECK(oos_r_squared(r2, rm2, rp2) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("clark-west matches the frozen hand computation") {
    std::vector<double> r = {0.02, -0.01, 0.03, 0.00, 0.015};
    std::vector<double> rm = {0.005, 0.006, 0.004, 0.007, 0.006};
    std::vector<double> rp = {0.015, -0.005, 0.02, 0.002, 0.012};
    double stat = 0.0, p = 1.0;
    clark_west(r, rm, rp, stat, p);
    CHECK(stat == doctest::Approx(2.44305063044507).epsilon(1e-12));
    CHECK(p == doctest::Approx(0.00728184698139962).epsilon(1e-10));

    oracle::ClarkWest cw = oracle::clark_west(r, rm, rp);
    CHECK(stat == doctest::Approx(cw.stat).epsilon(1e-10));
    CHECK(cw.f[0] == doctest::Approx(0.0003).epsilon(1e-12));
}

TEST_CASE("clark-west sign tracks the adjusted improvement") {
    // model strictly closer to realized than the mean forecast
    std::vector<double> r = {0.05, 0.04, 0.06, 0.03, 0.05};
    std::vector<double> rm(5, 0.0);
    std::vector<double> rp = {0.04, 0.05, 0.05, 0.04, 0.04};
    double stat = 0.0, p = 1.0;
    clark_west(r, rm, rp, stat, p);
    CHECK(stat > 0.0);
    CHECK(p < 0.05);
}

TEST_CASE("static oos evaluation is deterministic and structurally sound") {
    std::vector<double> gain, loss;
    make_var1_data(23, 700, gain, loss);
    std::vector<double> r(gain.size());
    for (size_t i = 0; i < r.size(); ++i) r[i] = gain[i] - loss[i];
    OosEvaluation a = evaluate_oos(gain, loss, r, 400, 4);
    OosEvaluation b = evaluate_oos(gain, loss, r, 400, 4);
    CHECK(a.model_forecast == b.model_forecast);
    CHECK(a.mean_forecast == b.mean_forecast);
    CHECK(a.r2_oos == b.r2_oos);
    CHECK(a.realized.size() == 300);
    // benchmark at the first evaluation point is the training-sample mean
    double m = 0.0;
    for (size_t t = 0; t < 400; ++t) m += r[t];
    CHECK(a.mean_forecast[0] == doctest::Approx(m / 400.0).epsilon(1e-12));
    // the model knows the true dynamics, so it should not lose to the mean
    CHECK(a.r2_oos > 0.0);
}

TEST_CASE("arch-in-mean with constant variance reduces to the AR(1) regression") {
    Rng rng(31);
    std::vector<double> r(300);
    r[0] = 0.0;
    for (size_t i = 1; i < r.size(); ++i) r[i] = 0.002 + 0.3 * r[i - 1] + 0.02 * rng.normal();
    ArchInMeanFit fit = fit_arch_in_mean(r, true);
    CHECK(fit.delta2 == 0.0);
    CHECK(std::fabs(fit.delta1 - 0.3) < 0.15);

    std::vector<std::vector<double>> x;
    std::vector<double> dep;
    for (size_t t = 1; t < r.size(); ++t) {
        x.push_back({1.0, r[t - 1]});
        dep.push_back(r[t]);
    }
    oracle::Ols o = oracle::ols(x, dep);
    CHECK(fit.delta0 == doctest::Approx(o.coef[0]).epsilon(1e-10));
    CHECK(fit.delta1 == doctest::Approx(o.coef[1]).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(o.r_squared).epsilon(1e-10));
}

TEST_CASE("arch-in-mean keeps the variance path positive and finds no phantom risk premium") {
    int insignificant = 0;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(400 + seed);
        // risk-return coefficient is truly zero: AR(1) mean with GARCH noise
        std::vector<double> r(800);
        double h = 1e-4, e_prev = 0.0;
        r[0] = 0.0;
        for (size_t i = 1; i < r.size(); ++i) {
            h = 2e-5 + 0.8 * h + 0.1 * e_prev * e_prev;
            double e = std::sqrt(h) * rng.normal();
            r[i] = 0.001 + 0.1 * r[i - 1] + e;
            e_prev = e;
        }
        ArchInMeanFit fit = fit_arch_in_mean(r, false);
        for (double v : fit.cond_variance) CHECK(v > 0.0);
        double t = std::isfinite(fit.delta_std_err[2]) && fit.delta_std_err[2] > 0.0
                       ? fit.delta2 / fit.delta_std_err[2]
                       : 0.0;
        if (std::fabs(t) < 2.0) ++insignificant;
    }
    CHECK(insignificant >= 8);
}

TEST_CASE("oos evaluation rejects bad windows") {
    std::vector<double> gain(200, 0.01), loss(200, 0.02), r(200, -0.01);
    CHECK_THROWS_AS(static_cast<void>(evaluate_oos(gain, loss, r, 220, 2)), DataError);
    CHECK_THROWS_AS(static_cast<void>(evaluate_oos(gain, loss, r, 10, 2)), DataError);
}

TEST_CASE("VAR(1) recovery holds across seeds, order selection included") {
    int order_ok = 0, coef_ok = 0;
    const int seeds = 20;
    for (uint64_t seed = 1; seed <= seeds; ++seed) {
        std::vector<double> gain, loss;
        make_var1_data(1000 + seed, 5000, gain, loss);
        VarFit fit = fit_var(gain, loss, 4);
        if (fit.order == 1) ++order_ok;
        VarFit f1 = fit.order == 1 ? fit : fit_var_order(gain, loss, 1);
        if (std::fabs(f1.gain_eq[1] - 0.3) <= 0.05 && std::fabs(f1.gain_eq[2] - 0.2) <= 0.05 &&
            std::fabs(f1.loss_eq[1] - 0.1) <= 0.05 && std::fabs(f1.loss_eq[2] - 0.25) <= 0.05)
            ++coef_ok;
    }
    CHECK(order_ok >= 18);
    CHECK(coef_ok >= 18);
}

TEST_CASE("static forecasts with frozen coefficients match the manual recursion") {
    std::vector<double> gain, loss;
    make_var1_data(42, 300, gain, loss);
    VarFit fit = fit_var_order(std::vector<double>(gain.begin(), gain.begin() + 200),
                               std::vector<double>(loss.begin(), loss.begin() + 200), 1);
    std::vector<double> fc = static_oos_return_forecast(fit, gain, loss, 200);
    REQUIRE(fc.size() == 100);
    for (size_t i = 0; i < fc.size(); ++i) {
        size_t t = 200 + i;
        double gh = fit.gain_eq[0] + fit.gain_eq[1] * gain[t - 1] + fit.gain_eq[2] * loss[t - 1];
        double lh = fit.loss_eq[0] + fit.loss_eq[1] * gain[t - 1] + fit.loss_eq[2] * loss[t - 1];
        CHECK(fc[i] == doctest::Approx(gh - lh).epsilon(1e-14));
    }
    CHECK_THROWS_AS(static_cast<void>(static_oos_return_forecast(fit, gain, loss, 0)),
                    NumericError);
}

TEST_CASE("both leverage forms fit and keep the variance path positive") {
    Rng rng(77);
    std::vector<double> r(600);
    double h = 1e-4, e_prev = -0.01;
    r[0] = 0.0;
    for (size_t i = 1; i < r.size(); ++i) {
        h = 2e-5 + 0.75 * h + 0.1 * e_prev * e_prev + (e_prev < 0 ? 0.08 * e_prev * e_prev : 0.0);
        double e = std::sqrt(h) * rng.normal();
        r[i] = 0.002 + 0.05 * r[i - 1] + e;
        e_prev = e;
    }
    for (LeverageForm form : {LeverageForm::squared_shock, LeverageForm::as_written}) {
        ArchInMeanFit fit = fit_arch_in_mean(r, false, form);
        CHECK(fit.omega0 > 0.0);
        CHECK(fit.omega1 >= 0.0);
        CHECK(fit.omega2 >= 0.0);
        CHECK(fit.omega3 >= 0.0);
        for (double v : fit.cond_variance) CHECK(v > 0.0);
        CHECK(std::isfinite(fit.log_likelihood));
    }
}
