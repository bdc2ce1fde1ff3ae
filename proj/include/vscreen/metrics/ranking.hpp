#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vscreen/core/errors.hpp"

namespace vscreen::metrics {

struct ScoredSet {
  std::vector<double> scores;
  std::vector<int> labels;  // 0/1
};

// FPR grid used for enrichment reporting: 0.5%, 1%, 2%, 5%.
inline constexpr std::array<double, 4> kEnrichmentFprGrid = {0.005, 0.01, 0.02,
                                                             0.05};

// Area under the ROC curve as the Mann-Whitney statistic: the probability
// that a random positive outscores a random negative, ties counting half.
// Requires at least one positive and one negative.
double roc_auc(const ScoredSet& s);

// TPR at the given FPR (linear interpolation between ROC vertices) divided
// by the FPR. fpr must lie strictly inside (0,1).
double roc_enrichment(const ScoredSet& s, double fpr);

// Mean over folds of per-fold AUC for one dataset.
double kfold_average(const std::vector<double>& fold_values);

// Mean and median over per-dataset values; even-count median is the midpoint
// of the central pair.
struct MeanMedian {
  double mean;
  double median;
};
MeanMedian mean_median(std::vector<double> values);

// log(p / (1-p)) with p clamped to [1e-4, 1 - 1e-4] so that AUC = 1.0 stays
// finite and ordering is preserved.
double logit(double p);

// logit(multitask K-fold-average AUC) - logit(single-task K-fold-average AUC).
double delta_log_odds_auc(double auc_multitask, double auc_singletask);

}  // namespace vscreen::metrics
