#pragma once

namespace vscreen::stats {

// Regularized incomplete beta I_x(a, b), evaluated with the continued
// fraction (modified Lentz). Absolute error below 1e-12 over the parameter
// ranges used here.
double regularized_incomplete_beta(double x, double a, double b);

// Student-t distribution function P(T <= t) with df degrees of freedom.
// Documented tolerance 1e-8.
double student_t_cdf(double t, double df);

// Upper tail P(T >= t).
double student_t_sf(double t, double df);

// Inverse of student_t_cdf in t (bisection; cdf(result) within 1e-8 of p).
double student_t_quantile(double p, double df);

// Quantile of the sorted values at probability p using linear interpolation
// between order statistics (the "type 7" rule).
double quantile_type7(const double* sorted, int n, double p);

}  // namespace vscreen::stats
