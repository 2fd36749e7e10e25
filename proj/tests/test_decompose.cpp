#include <doctest.h>

#include <cmath>
#include <string>

#include "oracles.hpp"
#include "pxt/bars.hpp"
#include "pxt/decompose.hpp"
#include "pxt/errors.hpp"
#include "pxt/rng.hpp"

using namespace pxt;

namespace {

const std::string kMonthlyFixture = std::string(PXT_TEST_DATA_DIR) + "/monthly_fixture.csv";

BarSeries two_bars(double prev_close, double o, double h, double l, double c) {
    BarSeries s;
    s.frequency = Frequency::monthly;
    s.bars.push_back({Date{2000, 1, 0}, prev_close, prev_close, prev_close, prev_close});
    s.bars.push_back({Date{2000, 2, 0}, o, h, l, c});
    return s;
}

}  // namespace

TEST_CASE("hand-evaluated high-extreme split") {
    BarSeries s = two_bars(100.0, 100.0, 110.0, 99.0, 105.0);
    DecomposedSeries d = decompose(s, Convention::high_extreme);
    REQUIRE(d.size() == 1);
    CHECK(d.ovr[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(d.pmg[0] == doctest::Approx(std::log(1.10)).epsilon(1e-12));
    CHECK(d.pml[0] == doctest::Approx(std::log(110.0 / 105.0)).epsilon(1e-12));
    CHECK(d.r[0] == doctest::Approx(std::log(105.0 / 100.0)).epsilon(1e-12));
    CHECK(d.pmg[0] == doctest::Approx(0.09531).epsilon(1e-4));
    CHECK(d.pml[0] == doctest::Approx(0.04652).epsilon(1e-4));
    CHECK(d.r[0] == doctest::Approx(0.04879).epsilon(1e-4));
}

TEST_CASE("flat bar decomposes to zeros") {
    BarSeries s = two_bars(100.0, 100.0, 100.0, 100.0, 100.0);
    for (Convention conv : {Convention::high_extreme, Convention::low_extreme}) {
        DecomposedSeries d = decompose(s, conv);
        CHECK(d.pmg[0] == 0.0);
        CHECK(d.pml[0] == 0.0);
        CHECK(d.r[0] == 0.0);
    }
}

TEST_CASE("additivity and non-negativity hold on the fixture for both conventions") {
    BarSeries s = load_bars(kMonthlyFixture, Frequency::monthly);
    for (Convention conv : {Convention::high_extreme, Convention::low_extreme}) {
        DecomposedSeries d = decompose(s, conv);
        REQUIRE(d.size() == 791);
        double worst_full = 0.0, worst_net = 0.0;
        for (size_t i = 0; i < d.size(); ++i) {
            worst_full = std::max(worst_full,
                                  std::fabs(d.r_full[i] - (d.ovr[i] + d.pmg[i] - d.pml[i])));
            worst_net = std::max(worst_net, std::fabs(d.r[i] - (d.pmg[i] - d.pml[i])));
            CHECK(d.pmg[i] >= 0.0);
            CHECK(d.pml[i] >= 0.0);
        }
        CHECK(worst_full < 1e-12);
        CHECK(worst_net < 1e-12);
    }
}

TEST_CASE("net return is identical under both conventions") {
    BarSeries s = load_bars(kMonthlyFixture, Frequency::monthly);
    DecomposedSeries high = decompose(s, Convention::high_extreme);
    DecomposedSeries low = decompose(s, Convention::low_extreme);
    for (size_t i = 0; i < high.size(); ++i) CHECK(high.r[i] == low.r[i]);
}

TEST_CASE("decompose requires two bars") {
    BarSeries s;
    s.frequency = Frequency::monthly;
    s.bars.push_back({Date{2000, 1, 0}, 1, 1, 1, 1});
    CHECK_THROWS_AS(static_cast<void>(decompose(s, Convention::high_extreme)), DataError);
}

TEST_CASE("overnight regression recovers exact linear relations") {
    DecomposedSeries d;
    d.frequency = Frequency::monthly;
    Rng rng(41);
    for (int i = 0; i < 50; ++i) {
        double r = 0.02 * rng.normal();
        d.dates.push_back(Date{2000 + i / 12, 1 + i % 12, 0});
        d.r.push_back(r);
        d.r_full.push_back(0.5 + 2.0 * r);  // exact affine relation
        d.ovr.push_back(0.0);
        d.pmg.push_back(0.0);
        d.pml.push_back(0.0);
    }
    OvernightShare os = overnight_share(d);
    CHECK(os.slope == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(os.intercept == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(os.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero overnight gaps give slope one and full fit") {
    // bars whose open equals the previous close
    BarSeries s;
    s.frequency = Frequency::monthly;
    double close = 100.0;
    Rng rng(42);
    for (int i = 0; i < 40; ++i) {
        OhlcBar b;
        b.date = Date{2000 + i / 12, 1 + i % 12, 0};
        b.open = close;
        b.close = b.open * std::exp(0.03 * rng.normal());
        b.high = std::max(b.open, b.close) * std::exp(std::fabs(0.01 * rng.normal()));
        b.low = std::min(b.open, b.close) * std::exp(-std::fabs(0.01 * rng.normal()));
        close = b.close;
        s.bars.push_back(b);
    }
    DecomposedSeries d = decompose(s, Convention::high_extreme);
    OvernightShare os = overnight_share(d);
    CHECK(os.slope == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(os.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("covariance identity holds at lags 1..6 on the fixture") {
    BarSeries s = load_bars(kMonthlyFixture, Frequency::monthly);
    DecomposedSeries d = decompose(s, Convention::high_extreme);
    for (size_t lag = 1; lag <= 6; ++lag) {
        CovarianceDecomposition cd = covariance_decomposition(d, lag);
        CHECK(std::fabs(cd.combined - cd.cov_r) < 1e-10);
    }
}

TEST_CASE("covariance identity holds on random decompositions at every lag") {
    Rng rng(97);
    for (int rep = 0; rep < 5; ++rep) {
        BarSeries s;
        s.frequency = Frequency::monthly;
        double close = 50.0 + 100.0 * rng.uniform();
        for (int i = 0; i < 120; ++i) {
            OhlcBar b;
            b.date = Date{1990 + i / 12, 1 + i % 12, 0};
            b.open = close * std::exp(0.01 * rng.normal());
            b.close = b.open * std::exp(0.05 * rng.normal());
            b.high = std::max(b.open, b.close) * std::exp(std::fabs(0.02 * rng.normal()));
            b.low = std::min(b.open, b.close) * std::exp(-std::fabs(0.02 * rng.normal()));
            close = b.close;
            s.bars.push_back(b);
        }
        for (Convention conv : {Convention::high_extreme, Convention::low_extreme}) {
            DecomposedSeries d = decompose(s, conv);
            for (size_t lag = 1; lag <= 6; ++lag) {
                CovarianceDecomposition cd = covariance_decomposition(d, lag);
                CHECK(std::fabs(cd.combined - cd.cov_r) < 1e-10);
            }
        }
    }
}

TEST_CASE("equal gain and loss series cancel in the combination") {
    DecomposedSeries d;
    d.frequency = Frequency::monthly;
    Rng rng(13);
    for (int i = 0; i < 80; ++i) {
        double v = std::fabs(rng.normal()) * 0.02;
        d.dates.push_back(Date{2000 + i / 12, 1 + i % 12, 0});
        d.pmg.push_back(v);
        d.pml.push_back(v);
        d.r.push_back(0.0);
        d.r_full.push_back(0.0);
        d.ovr.push_back(0.0);
    }
    CovarianceDecomposition cd = covariance_decomposition(d, 1);
    CHECK(std::fabs(cd.combined) < 1e-15);
    CHECK(cd.cov_r == 0.0);
}

TEST_CASE("each covariance term matches the brute-force loop at lag 2") {
    DecomposedSeries d;
    d.frequency = Frequency::monthly;
    Rng rng(29);
    for (int i = 0; i < 70; ++i) {
        d.dates.push_back(Date{2000 + i / 12, 1 + i % 12, 0});
        double g = std::fabs(rng.normal()) * 0.03;
        double l = std::fabs(rng.normal()) * 0.025;
        d.pmg.push_back(g);
        d.pml.push_back(l);
        d.r.push_back(g - l);
        d.r_full.push_back(g - l);
        d.ovr.push_back(0.0);
    }
    CovarianceDecomposition cd = covariance_decomposition(d, 2);
    CHECK(cd.gain_gain == doctest::Approx(oracle::cov_aligned(d.pmg, d.pmg, 2)).epsilon(1e-12));
    CHECK(cd.loss_loss == doctest::Approx(oracle::cov_aligned(d.pml, d.pml, 2)).epsilon(1e-12));
    CHECK(cd.gain_loss == doctest::Approx(oracle::cov_aligned(d.pmg, d.pml, 2)).epsilon(1e-12));
    CHECK(cd.loss_gain == doctest::Approx(oracle::cov_aligned(d.pml, d.pmg, 2)).epsilon(1e-12));
    CHECK(std::fabs(cd.combined - cd.cov_r) < 1e-10);
}
