#pragma once

#include <string>
#include <vector>

#include "vscreen/core/errors.hpp"

namespace vscreen::stats {

// Two aligned columns of values keyed by the same items (datasets, usually).
struct PairedSample {
  std::vector<double> a;
  std::vector<double> b;
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

struct SignTestResult {
  int wins = 0;    // a > b
  int losses = 0;  // a < b
  int ties = 0;
  WilsonInterval ci;  // interval for the fraction wins / (wins + losses)
};

struct TTestResult {
  double t = 0.0;
  double p = 0.0;
  double df = 0.0;
  int sides = 2;
};

// Wilson score interval for wins successes out of n trials at normal
// quantile z (1.96 for 95%).
WilsonInterval wilson_interval(int wins, int n, double z);

// Sign test: counts a_i > b_i as wins, drops ties from n, and returns the
// Wilson interval for the win fraction.
SignTestResult sign_test_wilson(const PairedSample& paired, double z = 1.96);

// Paired Student t-test on the differences a - b. sides is 1 (upper tail,
// mean difference > 0) or 2. Zero-variance differences are an error.
TTestResult paired_t_test(const PairedSample& paired, int sides = 2);

// Welch two-sample t-test (unequal variances, Welch-Satterthwaite df),
// testing mean(a) - mean(b); sides as above.
TTestResult welch_t_test(const std::vector<double>& a,
                         const std::vector<double>& b, int sides = 1);

// Boxplot notch: median +/- 1.57 * IQR / sqrt(N), quartiles by linear
// interpolation (type 7).
struct NotchInterval {
  double median = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};
NotchInterval notch_interval(std::vector<double> values);

// JSON record {test, statistic/p or CI, n, parameters} for the CLI outputs.
std::string to_json_record(const SignTestResult& r, int n, double z);
std::string to_json_record(const TTestResult& r, const std::string& test,
                           int n);

}  // namespace vscreen::stats
