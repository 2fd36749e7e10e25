#pragma once

namespace pxt {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double incomplete_beta(double a, double b, double x);

double normal_cdf(double x);

// Upper-tail probabilities used for test p-values.
double chi_squared_sf(double x, double dof);
double f_sf(double f, double dof1, double dof2);
double student_t_sf(double t, double dof);

// Two-sided p-value for a t statistic.
double student_t_two_sided(double t, double dof);

}  // namespace pxt
