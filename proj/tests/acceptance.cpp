// Acceptance suite: runs every gate criterion and prints one line per
// criterion. Exit status is the number of failures; SKIP is reserved for
// the data-dependent replication when the external files are absent.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "pxt/arma_garch.hpp"
#include "pxt/backtest.hpp"
#include "pxt/bars.hpp"
#include "pxt/decompose.hpp"
#include "pxt/engine.hpp"
#include "pxt/errors.hpp"
#include "pxt/inference.hpp"
#include "pxt/rng.hpp"
#include "pxt/stats.hpp"
#include "pxt/var_forecast.hpp"

using namespace pxt;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& description, bool pass,
            const std::string& detail = "") {
    std::printf("%s criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion,
                description.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++g_failures;
}

void report_skip(int criterion, const std::string& description, const std::string& reason) {
    std::printf("SKIP criterion %d: %s -- %s\n", criterion, description.c_str(), reason.c_str());
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const std::string kData = PXT_TEST_DATA_DIR;

std::string temp_dir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("pxt_acceptance_" + tag);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

// ---- criterion 1: decomposition identity ----------------------------------
void criterion_1() {
    auto start = std::chrono::steady_clock::now();
    BarSeries bars = load_bars(kData + "/monthly_fixture.csv", Frequency::monthly);
    double worst = 0.0;
    double min_part = 0.0;
    for (Convention conv : {Convention::high_extreme, Convention::low_extreme}) {
        DecomposedSeries d = decompose(bars, conv);
        for (size_t i = 0; i < d.size(); ++i) {
            worst = std::max(worst, std::fabs(d.r_full[i] - (d.ovr[i] + d.pmg[i] - d.pml[i])));
            min_part = std::min({min_part, d.pmg[i], d.pml[i]});
        }
    }
    double secs = elapsed_s(start);
    char detail[160];
    std::snprintf(detail, sizeof detail, "max identity gap %.3e, min component %.3e, %.3fs",
                  worst, min_part, secs);
    report(1, "decomposition identity and non-negativity on the 792-bar fixture",
           worst < 1e-12 && min_part >= 0.0 && secs < 1.0, detail);
}

// ---- criterion 2: covariance identity --------------------------------------
void criterion_2() {
    BarSeries bars = load_bars(kData + "/monthly_fixture.csv", Frequency::monthly);
    DecomposedSeries d = decompose(bars, Convention::high_extreme);
    double worst = 0.0;
    for (size_t lag = 1; lag <= 6; ++lag) {
        CovarianceDecomposition cd = covariance_decomposition(d, lag);
        worst = std::max(worst, std::fabs(cd.combined - cd.cov_r));
    }
    char detail[80];
    std::snprintf(detail, sizeof detail, "max gap %.3e", worst);
    report(2, "four-term covariance combination equals Cov(r_t, r_t-i) for lags 1..6",
           worst < 1e-10, detail);
}

// ---- criterion 3: brute-force statistical oracles ---------------------------
void criterion_3() {
    bool ok = true;
    std::ostringstream why;

    const std::vector<double> x8 = {0.4, -1.2, 0.3, 2.1, -0.7, 0.9, -1.5, 0.2};
    if (std::fabs(ljung_box(x8, 2).q - oracle::ljung_box_q(x8, 2)) > 1e-8) {
        ok = false;
        why << "ljung-box ";
    }
    const std::vector<double> x10 = {1.2, -0.4, 0.8, 2.5, -1.7, 0.3, 0.9, -0.2, 1.1, -3.0};
    if (std::fabs(jarque_bera(x10).statistic - oracle::jarque_bera(x10)) > 1e-8) {
        ok = false;
        why << "jarque-bera ";
    }

    // deterministic 50-point vectors
    std::vector<double> gx(50), gy(50);
    unsigned long long state = 20240915ull;
    auto rnd = [&]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return static_cast<double>(state % 20001) / 10000.0 - 1.0;
    };
    gx[0] = rnd();
    gy[0] = rnd();
    for (size_t i = 1; i < 50; ++i) {
        gx[i] = rnd();
        gy[i] = 0.5 * gx[i - 1] + rnd();
    }

    {  // OLS
        std::vector<std::vector<double>> xo;
        std::vector<double> dep;
        Matrix xm(48, 3);
        for (size_t t = 2; t < 50; ++t) {
            xo.push_back({1.0, gx[t - 1], gy[t - 1]});
            dep.push_back(gy[t]);
            xm(t - 2, 0) = 1.0;
            xm(t - 2, 1) = gx[t - 1];
            xm(t - 2, 2) = gy[t - 1];
        }
        oracle::Ols o = oracle::ols(xo, dep);
        LeastSquares fit = ols(xm, dep);
        for (size_t j = 0; j < 3; ++j)
            if (std::fabs(fit.coef[j] - o.coef[j]) > 1e-8) {
                ok = false;
                why << "ols ";
                break;
            }
    }

    {  // Granger F
        GrangerResult g = granger_test(gx, gy, 2);
        if (std::fabs(g.f_stat - oracle::granger_f(gx, gy, 2)) > 1e-8 * std::max(1.0, g.f_stat)) {
            ok = false;
            why << "granger ";
        }
    }

    {  // VAR, equation by equation
        VarFit fit = fit_var_order(gx, gy, 2);
        std::vector<std::vector<double>> xo;
        std::vector<double> dg, dl;
        for (size_t t = 2; t < 50; ++t) {
            xo.push_back({1.0, gx[t - 1], gx[t - 2], gy[t - 1], gy[t - 2]});
            dg.push_back(gx[t]);
            dl.push_back(gy[t]);
        }
        oracle::Ols og = oracle::ols(xo, dg);
        oracle::Ols ol = oracle::ols(xo, dl);
        for (size_t j = 0; j < 5; ++j) {
            if (std::fabs(fit.gain_eq[j] - og.coef[j]) > 1e-8 ||
                std::fabs(fit.loss_eq[j] - ol.coef[j]) > 1e-8) {
                ok = false;
                why << "var ";
                break;
            }
        }
    }

    report(3, "ljung-box, jarque-bera, ols, var and granger match brute-force formulas", ok,
           ok ? "" : why.str());
}

// ---- criterion 4: granger monte carlo ---------------------------------------
void criterion_4() {
    auto start = std::chrono::steady_clock::now();
    Engine engine(RunConfig::from_json_text("{\"sims\":500,\"seed\":20240915,\"output_dir\":\"" +
                                            temp_dir("granger") + "\"}"));
    engine.run("simulate", "granger-size");
    engine.run("simulate", "granger-power");

    auto parse = [&](const std::string& file) {
        std::ifstream in(engine.config().output_dir + "/" + file);
        std::string line, payload;
        while (std::getline(in, line))
            if (line.empty() || line[0] != '#') payload += line + "\n";
        return nlohmann::json::parse(payload);
    };
    double size5 = parse("simulation_granger-size.json")["reject_rate_5pct"].get<double>();
    double power5 = parse("simulation_granger-power.json")["reject_rate_5pct"].get<double>();
    double secs = elapsed_s(start);
    char detail[120];
    std::snprintf(detail, sizeof detail, "size %.3f (want 0.02..0.08), power %.3f, %.1fs", size5,
                  power5, secs);
    report(4, "granger size within 5% +/- 3pp and power >= 90% (500 sims each)",
           size5 >= 0.02 && size5 <= 0.08 && power5 >= 0.90 && secs < 60.0, detail);
}

// ---- criterion 5: arma-garch recovery ---------------------------------------
void criterion_5() {
    auto start = std::chrono::steady_clock::now();
    Engine engine(RunConfig::from_json_text("{\"sims\":50,\"seed\":777,\"output_dir\":\"" +
                                            temp_dir("garch") + "\"}"));
    engine.run("simulate", "garch-recovery");
    std::ifstream in(engine.config().output_dir + "/simulation_garch-recovery.json");
    std::string line, payload;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') payload += line + "\n";
    auto j = nlohmann::json::parse(payload);
    double recovery = j["recovery_rate"].get<double>();
    double optimal = j["local_optimality_rate"].get<double>();
    double secs = elapsed_s(start);
    char detail[140];
    std::snprintf(detail, sizeof detail, "recovery %.2f (want >= 0.90), local optimality %.2f, %.1fs",
                  recovery, optimal, secs);
    report(5, "known-parameter arma-garch recovery across 50 seeds",
           recovery >= 0.90 && optimal == 1.0 && secs < 300.0, detail);
}

// ---- criterion 6: clark-west hand example -----------------------------------
void criterion_6() {
    std::vector<double> r = {0.02, -0.01, 0.03, 0.00, 0.015};
    std::vector<double> rm = {0.005, 0.006, 0.004, 0.007, 0.006};
    std::vector<double> rp = {0.015, -0.005, 0.02, 0.002, 0.012};
    double stat = 0.0, p = 1.0;
    clark_west(r, rm, rp, stat, p);
    oracle::ClarkWest cw = oracle::clark_west(r, rm, rp);
    double manual_p = 0.5 * std::erfc(cw.stat / std::sqrt(2.0));
    bool ok = std::fabs(stat - cw.stat) < 1e-10 && std::fabs(p - manual_p) < 1e-10 &&
              std::fabs(stat - 2.44305063044507) < 1e-10 &&
              std::fabs(p - 0.00728184698139962) < 1e-10;
    char detail[100];
    std::snprintf(detail, sizeof detail, "stat %.12f p %.12f", stat, p);
    report(6, "clark-west statistic and p-value match the 5-observation hand computation", ok,
           detail);
}

// ---- criterion 7: data-dependent replication --------------------------------
std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? v : fallback;
}

void criterion_7() {
    const std::string desc = "replication figures on user-supplied index and predictor data";
    std::string bars_path = env_or("PXT_SP500_MONTHLY", "data/sp500_monthly.csv");
    std::string pred_path = env_or("PXT_GOYAL_PREDICTORS", "data/goyal_predictors.csv");
    if (!std::filesystem::exists(bars_path) || !std::filesystem::exists(pred_path)) {
        report_skip(7, desc,
                    "external dataset not present (set PXT_SP500_MONTHLY and "
                    "PXT_GOYAL_PREDICTORS)");
        return;
    }
    try {
        bool ok = true;
        std::ostringstream detail;
        BarSeries bars = load_bars(bars_path, Frequency::monthly);
        DecomposedSeries d = decompose(bars, Convention::high_extreme);

        double mr = mean(d.r), mg = mean(d.pmg), ml = mean(d.pml);
        bool means_ok = std::fabs(mr - 6.051e-3) <= 0.10 * 6.051e-3 &&
                        std::fabs(mg - 0.033) <= 0.10 * 0.033 &&
                        std::fabs(ml - 0.027) <= 0.10 * 0.027;
        detail << "means r/pmg/pml " << mr << "/" << mg << "/" << ml;
        ok = ok && means_ok;

        double corr = pearson(d.pmg, d.pml);
        detail << ", corr " << corr;
        ok = ok && std::fabs(corr - 0.187) <= 0.05;

        auto grid = default_spec_grid();
        std::vector<double> gain_f = filtered_series(select_arma_garch(sqrt_transform(d.pmg), grid));
        std::vector<double> loss_f = filtered_series(select_arma_garch(sqrt_transform(d.pml), grid));
        for (size_t lag : {2u, 4u, 6u}) {
            double p_lg = granger_test(loss_f, gain_f, lag).p_value;
            double p_gl = granger_test(gain_f, loss_f, lag).p_value;
            ok = ok && p_lg < 0.01 && p_gl > 0.05;
            detail << ", lag" << lag << " p " << p_lg << "/" << p_gl;
        }

        VarFit var = fit_var(d.pmg, d.pml, 6);
        InSampleForecast ins = in_sample_return_forecast(var, d.pmg, d.pml);
        detail << ", var r2 " << 100.0 * ins.r_squared << "%";
        ok = ok && ins.r_squared >= 0.010 && ins.r_squared <= 0.025;

        // 1971 split
        size_t split = 0;
        Date target{1971, 1, 0};
        while (split < d.size() && d.dates[split] < target) ++split;
        OosEvaluation ev = evaluate_oos(d.pmg, d.pml, d.r, split, 6);
        detail << ", r2_oos " << 100.0 * ev.r2_oos << "%";
        ok = ok && ev.r2_oos > 0.0;

        PredictorTable pt = load_predictors(pred_path, bars);
        const PredictorSeries* tbl = nullptr;
        for (const auto& s : pt.series)
            if (s.name == "TBL") tbl = &s;
        if (!tbl) {
            report(7, desc, false, "predictor file lacks a TBL column");
            return;
        }
        std::vector<double> rf(tbl->values.begin() + 1, tbl->values.end());
        for (double& v : rf) v /= 12.0;
        BacktestConfig bc;
        std::vector<double> rf_window(rf.begin() + split, rf.end());
        BacktestReport rep = run_backtest(d.r, split, ev.mean_forecast, ev.model_forecast,
                                          rf_window, bc);
        detail << ", cer " << rep.cer_gain << "%";
        ok = ok && rep.cer_gain > 0.0;

        report(7, desc, ok, detail.str());
    } catch (const Error& e) {
        report(7, desc, false, e.what());
    }
}

// ---- criterion 8: portfolio ledger -------------------------------------------
void criterion_8() {
    bool ok = true;
    std::ostringstream why;

    {  // 24-period toy vs the hand ledger
        Rng rng(2024);
        BacktestConfig cfg;
        cfg.variance_window = 8;
        const size_t n = 32;
        std::vector<double> r, rm, rp, rf;
        for (size_t i = 0; i < n; ++i) r.push_back(0.006 + 0.035 * rng.normal());
        for (size_t i = 0; i < 24; ++i) {
            rm.push_back(0.004 + 0.002 * rng.normal());
            rp.push_back(0.004 + 0.01 * rng.normal());
            rf.push_back(0.003 + 0.0005 * rng.normal());
        }
        BacktestReport rep = run_backtest(r, 8, rm, rp, rf, cfg);
        std::vector<double> ret0, retp;
        for (size_t i = 0; i < 24; ++i) {
            std::vector<double> window(r.begin() + i, r.begin() + i + 8);
            double var_hat = oracle::variance_n1(window);
            double w0 = std::clamp((rm[i] - rf[i]) / (3.0 * var_hat), 0.0, 1.5);
            double wp = std::clamp((rp[i] - rf[i]) / (3.0 * var_hat), 0.0, 1.5);
            if (std::fabs(rep.weight_bench[i] - w0) > 1e-14 ||
                std::fabs(rep.weight_model[i] - wp) > 1e-14) {
                ok = false;
                why << "weights ";
                break;
            }
            ret0.push_back(w0 * (r[8 + i] - rf[i]) + rf[i]);
            retp.push_back(wp * (r[8 + i] - rf[i]) + rf[i]);
            if (rep.weight_model[i] < 0.0 || rep.weight_model[i] > 1.5) {
                ok = false;
                why << "bounds ";
            }
        }
        if (ok) {
            double v0 = oracle::mean(ret0) - 1.5 * oracle::variance_n1(ret0);
            double vp = oracle::mean(retp) - 1.5 * oracle::variance_n1(retp);
            if (std::fabs(rep.cer_gain - 1200.0 * (vp - v0)) > 1e-10) {
                ok = false;
                why << "cer ";
            }
        }
    }

    // CER formula consistency on random inputs
    for (uint64_t seed = 1; seed <= 5 && ok; ++seed) {
        Rng rng(seed);
        BacktestConfig cfg;
        cfg.variance_window = 10;
        cfg.annualization = 100.0 * seed;
        const size_t n = 60;
        std::vector<double> r, rm, rp, rf;
        for (size_t i = 0; i < n; ++i) r.push_back(0.005 + 0.04 * rng.normal());
        for (size_t i = 0; i < n - 10; ++i) {
            rm.push_back(0.003 + 0.004 * rng.normal());
            rp.push_back(0.003 + 0.012 * rng.normal());
            rf.push_back(0.002);
        }
        BacktestReport rep = run_backtest(r, 10, rm, rp, rf, cfg);
        if (rep.cer_gain != cfg.annualization * (rep.utility_model - rep.utility_bench)) {
            ok = false;
            why << "consistency ";
        }
        for (double w : rep.weight_model)
            if (w < cfg.weight_min || w > cfg.weight_max) {
                ok = false;
                why << "bounds ";
            }
    }
    report(8, "toy backtest matches the hand ledger; weights bounded; cer formula exact", ok,
           ok ? "" : why.str());
}

}  // namespace

int main() {
    std::printf("pxt acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (g_failures == 0) std::printf("all runnable criteria passed\n");
    return g_failures;
}
