#include "vscreen/stats/special.hpp"

#include <cmath>

namespace vscreen::stats {

namespace {

// Continued fraction for the incomplete beta function, modified Lentz.
double beta_cf(double x, double a, double b) {
  const double tiny = 1e-300;
  const double eps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    // even term
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    // odd term
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0) || a <= 0.0 || b <= 0.0) return NAN;
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(log_front) * beta_cf(x, a, b) / a;
  return 1.0 - std::exp(log_front) * beta_cf(1.0 - x, b, a) / b;
}

double student_t_cdf(double t, double df) {
  if (df <= 0.0) return NAN;
  const double half = 0.5 * regularized_incomplete_beta(
                                df / (t * t + df), 0.5 * df, 0.5);
  return t >= 0.0 ? 1.0 - half : half;
}

double student_t_sf(double t, double df) { return student_t_cdf(-t, df); }

double student_t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0) || df <= 0.0) return NAN;
  if (p == 0.5) return 0.0;
  double lo = -1.0, hi = 1.0;
  while (student_t_cdf(lo, df) > p) lo *= 2.0;
  while (student_t_cdf(hi, df) < p) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::fabs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, df) < p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double quantile_type7(const double* sorted, int n, double p) {
  if (n == 1) return sorted[0];
  const double h = (n - 1) * p;
  const int lo = static_cast<int>(std::floor(h));
  const int hi = lo + 1 >= n ? n - 1 : lo + 1;
  const double frac = h - lo;
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace vscreen::stats
