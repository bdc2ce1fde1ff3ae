#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vscreen/data/analysis.hpp"
#include "vscreen/data/collection.hpp"
#include "vscreen/metrics/report.hpp"
#include "vscreen/stats/tests.hpp"

namespace vscreen::experiments {

// One dataset's point on the improvement-vs-sharing scatter.
struct AorPoint {
  std::string dataset;
  double aor_mean = 0.0;
  double aor_std = 0.0;
  double delta_log_odds = 0.0;
};

struct AorAnalysis {
  std::vector<AorPoint> points;
  double r2 = 0.0;  // OLS r^2 of delta on AOR; 0 when either side is constant
};

// Joins a multitask and a single-task evaluation report over the collection:
// per dataset, AOR (excluding exclude_group from the counts and from the
// rows) against the difference in log-odds of the K-fold-average AUC.
AorAnalysis run_aor_analysis(const metrics::EvalReport& multitask,
                             const metrics::EvalReport& singletask,
                             const data::Collection& c,
                             std::optional<data::Group> exclude_group = {});

void save_aor_csv(const AorAnalysis& a, const std::string& path);

struct ClassRow {
  std::string target_class;  // small classes merged into "miscellaneous"
  std::size_t n = 0;
  double mean = 0.0;
  stats::NotchInterval notch;
};

struct DuplicateAnalysis {
  bool applicable = false;   // false when every target is unique
  std::size_t n_duplicate = 0;
  std::size_t n_unique = 0;
  double mean_delta_duplicate = 0.0;
  double mean_delta_unique = 0.0;
  stats::TTestResult welch_one_sided;  // duplicate > unique
  stats::SignTestResult sign_duplicate;  // multitask wins within duplicates
  stats::SignTestResult sign_unique;
};

struct ClassDuplicateResult {
  std::vector<ClassRow> classes;
  DuplicateAnalysis duplicates;
};

// Per-target-class delta log-odds distributions (classes with fewer than
// five members merged into "miscellaneous") plus the duplicate-vs-unique
// comparison.
ClassDuplicateResult run_class_and_duplicate_analysis(
    const metrics::EvalReport& multitask,
    const metrics::EvalReport& singletask, const data::Collection& c,
    std::optional<data::Group> exclude_group = {});

void save_class_duplicate_json(const ClassDuplicateResult& r,
                               const std::string& path);

}  // namespace vscreen::experiments
