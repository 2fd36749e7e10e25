#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "pxt/dist.hpp"

using namespace pxt;

// The chi-square, t and F tails all have closed forms at low degrees of
// freedom; those serve as independent oracles for the incomplete gamma and
// beta machinery.

TEST_CASE("chi-square survival matches closed forms") {
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0}) {
        CHECK(chi_squared_sf(x, 2.0) == doctest::Approx(std::exp(-0.5 * x)).epsilon(1e-12));
        CHECK(chi_squared_sf(x, 4.0) ==
              doctest::Approx(std::exp(-0.5 * x) * (1.0 + 0.5 * x)).epsilon(1e-12));
        CHECK(chi_squared_sf(x, 1.0) ==
              doctest::Approx(1.0 - std::erf(std::sqrt(0.5 * x))).epsilon(1e-11));
    }
    CHECK(chi_squared_sf(0.0, 3.0) == 1.0);
}

TEST_CASE("normal cdf reference points") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.0) == doctest::Approx(0.841344746068543).epsilon(1e-12));
    CHECK(normal_cdf(2.0) == doctest::Approx(0.977249868051821).epsilon(1e-12));
    CHECK(normal_cdf(-1.0) == doctest::Approx(1.0 - normal_cdf(1.0)).epsilon(1e-12));
}

TEST_CASE("student t closed forms at 1 and 2 dof") {
    // dof 1: two-sided p = 1 - (2/pi) atan(|t|)
    for (double t : {0.3, 1.0, 1.7320508075688772, 4.0}) {
        double expected = 1.0 - 2.0 / 3.141592653589793 * std::atan(t);
        CHECK(student_t_two_sided(t, 1.0) == doctest::Approx(expected).epsilon(1e-10));
    }
    // dof 2: cdf = 1/2 + t / (2 sqrt(2 + t^2))
    for (double t : {0.5, 1.4142135623730951, 3.0}) {
        double expected = 2.0 * (0.5 - t / (2.0 * std::sqrt(2.0 + t * t)));
        CHECK(student_t_two_sided(t, 2.0) == doctest::Approx(expected).epsilon(1e-10));
    }
    CHECK(student_t_sf(0.0, 5.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(student_t_sf(-2.0, 5.0) == doctest::Approx(1.0 - student_t_sf(2.0, 5.0)).epsilon(1e-12));
}

TEST_CASE("F tail agrees with its t-squared and closed-form identities") {
    // F(1, d) is t(d) squared
    for (double t : {0.7, 1.3, 2.4}) {
        for (double d : {3.0, 8.0, 21.0}) {
            CHECK(f_sf(t * t, 1.0, d) == doctest::Approx(student_t_two_sided(t, d)).epsilon(1e-10));
        }
    }
    // d1 = 2: sf = (1 + 2 f / d2)^(-d2/2)
    for (double f : {0.4, 1.0, 3.5}) {
        for (double d2 : {4.0, 10.0}) {
            CHECK(f_sf(f, 2.0, d2) ==
                  doctest::Approx(std::pow(1.0 + 2.0 * f / d2, -0.5 * d2)).epsilon(1e-10));
        }
    }
    CHECK(f_sf(0.0, 3.0, 9.0) == 1.0);
}

TEST_CASE("incomplete beta and gamma basic identities") {
    for (double x : {0.1, 0.25, 0.5, 0.9}) {
        CHECK(incomplete_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-12));
        CHECK(incomplete_beta(2.0, 2.0, x) == doctest::Approx(x * x * (3.0 - 2.0 * x)).epsilon(1e-12));
        CHECK(gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
    }
    CHECK(incomplete_beta(3.0, 5.0, 0.0) == 0.0);
    CHECK(incomplete_beta(3.0, 5.0, 1.0) == 1.0);
}
