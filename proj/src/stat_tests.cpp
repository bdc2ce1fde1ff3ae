#include "vscreen/stats/tests.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vscreen/stats/special.hpp"

namespace vscreen::stats {

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Unbiased sample variance.
double variance_of(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

double tail_p(double t, double df, int sides) {
  if (sides == 1) return student_t_sf(t, df);
  if (sides == 2) return 2.0 * student_t_sf(std::fabs(t), df);
  throw DataError("sides must be 1 or 2");
}

}  // namespace

WilsonInterval wilson_interval(int wins, int n, double z) {
  if (n < 1) throw DataError("Wilson interval requires n >= 1");
  if (wins < 0 || wins > n) throw DataError("wins out of range");
  const double nn = static_cast<double>(n);
  const double p_hat = static_cast<double>(wins) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p_hat + z2 / (2.0 * nn)) / denom;
  const double half =
      (z / denom) * std::sqrt(p_hat * (1.0 - p_hat) / nn + z2 / (4.0 * nn * nn));
  // the exact interval lies in [0,1]; rounding can poke a hair outside
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

SignTestResult sign_test_wilson(const PairedSample& paired, double z) {
  if (paired.a.size() != paired.b.size())
    throw DataError("sign test requires aligned samples");
  SignTestResult r;
  for (std::size_t i = 0; i < paired.a.size(); ++i) {
    if (paired.a[i] > paired.b[i]) ++r.wins;
    else if (paired.a[i] < paired.b[i]) ++r.losses;
    else ++r.ties;
  }
  const int n = r.wins + r.losses;
  if (n < 1) throw DataError("sign test: all pairs tied");
  r.ci = wilson_interval(r.wins, n, z);
  return r;
}

TTestResult paired_t_test(const PairedSample& paired, int sides) {
  if (paired.a.size() != paired.b.size())
    throw DataError("paired t-test requires aligned samples");
  const std::size_t n = paired.a.size();
  if (n < 2) throw DataError("paired t-test requires n >= 2");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = paired.a[i] - paired.b[i];
  const double m = mean_of(d);
  const double var = variance_of(d, m);
  if (var <= 0.0)
    throw DataError("paired t-test: zero variance of differences");
  TTestResult r;
  r.sides = sides;
  r.df = static_cast<double>(n - 1);
  r.t = m / std::sqrt(var / static_cast<double>(n));
  r.p = tail_p(r.t, r.df, sides);
  return r;
}

TTestResult welch_t_test(const std::vector<double>& a,
                         const std::vector<double>& b, int sides) {
  if (a.size() < 2 || b.size() < 2)
    throw DataError("Welch t-test requires n >= 2 in both samples");
  const double ma = mean_of(a), mb = mean_of(b);
  const double va = variance_of(a, ma), vb = variance_of(b, mb);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = va / na, sb = vb / nb;
  if (sa + sb <= 0.0) throw DataError("Welch t-test: both samples constant");
  TTestResult r;
  r.sides = sides;
  r.t = (ma - mb) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) /
         (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  r.p = tail_p(r.t, r.df, sides);
  return r;
}

NotchInterval notch_interval(std::vector<double> values) {
  if (values.empty()) throw DataError("notch interval of an empty sample");
  std::sort(values.begin(), values.end());
  const int n = static_cast<int>(values.size());
  const double median = quantile_type7(values.data(), n, 0.5);
  const double iqr = quantile_type7(values.data(), n, 0.75) -
                     quantile_type7(values.data(), n, 0.25);
  const double h = 1.57 * iqr / std::sqrt(static_cast<double>(n));
  return {median, median - h, median + h};
}

std::string to_json_record(const SignTestResult& r, int n, double z) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "{\"test\":\"sign_test_wilson\",\"wins\":%d,\"losses\":%d,"
                "\"ties\":%d,\"n\":%d,\"z\":%.6g,\"ci\":[%.10g,%.10g]}",
                r.wins, r.losses, r.ties, n, z, r.ci.lo, r.ci.hi);
  return buf;
}

std::string to_json_record(const TTestResult& r, const std::string& test,
                           int n) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "{\"test\":\"%s\",\"statistic\":%.10g,\"p\":%.10g,"
                "\"df\":%.10g,\"sides\":%d,\"n\":%d}",
                test.c_str(), r.t, r.p, r.df, r.sides, n);
  return buf;
}

}  // namespace vscreen::stats
