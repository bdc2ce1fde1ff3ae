#include "vscreen/metrics/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vscreen::metrics {

namespace {

void check_two_classes(const ScoredSet& s, const char* op) {
  if (s.scores.size() != s.labels.size())
    throw DataError(std::string(op) + ": scores and labels differ in length");
  std::size_t pos = 0;
  for (int l : s.labels) pos += static_cast<std::size_t>(l != 0);
  if (pos == 0 || pos == s.labels.size())
    throw DataError(std::string(op) +
                    " requires at least one positive and one negative");
}

}  // namespace

double roc_auc(const ScoredSet& s) {
  check_two_classes(s, "roc_auc");
  const std::size_t n = s.scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return s.scores[a] < s.scores[b];
  });

  // Average ranks over tie groups; the rank-sum form of Mann-Whitney is
  // exactly the pairwise half-credit count.
  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && s.scores[idx[j]] == s.scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (s.labels[idx[k]] != 0) {
        rank_sum_pos += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  const double u = rank_sum_pos -
                   static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double roc_enrichment(const ScoredSet& s, double fpr) {
  if (!(fpr > 0.0 && fpr < 1.0))
    throw DataError("enrichment FPR must lie strictly in (0,1)");
  check_two_classes(s, "roc_enrichment");

  const std::size_t n = s.scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return s.scores[a] > s.scores[b];
  });

  std::size_t n_pos = 0;
  for (int l : s.labels) n_pos += static_cast<std::size_t>(l != 0);
  const std::size_t n_neg = n - n_pos;

  // ROC vertices at distinct-score thresholds, starting from (0,0). A tied
  // block advances both counts at once, so interpolation inside it follows
  // the diagonal segment.
  double prev_fpr = 0.0, prev_tpr = 0.0;
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && s.scores[idx[j]] == s.scores[idx[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) {
      if (s.labels[idx[k]] != 0) ++tp;
      else ++fp;
    }
    const double cur_fpr = static_cast<double>(fp) / static_cast<double>(n_neg);
    const double cur_tpr = static_cast<double>(tp) / static_cast<double>(n_pos);
    if (cur_fpr >= fpr) {
      double tpr_at;
      if (cur_fpr == prev_fpr) {
        tpr_at = cur_tpr;
      } else {
        const double t = (fpr - prev_fpr) / (cur_fpr - prev_fpr);
        tpr_at = prev_tpr + t * (cur_tpr - prev_tpr);
      }
      return tpr_at / fpr;
    }
    prev_fpr = cur_fpr;
    prev_tpr = cur_tpr;
    i = j;
  }
  return 1.0 / fpr;  // fpr beyond the last vertex: TPR is 1
}

double kfold_average(const std::vector<double>& fold_values) {
  if (fold_values.empty()) throw DataError("no fold values to average");
  double sum = 0.0;
  for (double v : fold_values) sum += v;
  return sum / static_cast<double>(fold_values.size());
}

MeanMedian mean_median(std::vector<double> values) {
  if (values.empty()) throw DataError("mean_median of an empty list");
  double sum = 0.0;
  for (double v : values) sum += v;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  double median = (n % 2 == 1) ? values[n / 2]
                               : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return {sum / static_cast<double>(n), median};
}

double logit(double p) {
  const double lo = 1e-4;
  p = std::min(std::max(p, lo), 1.0 - lo);
  return std::log(p / (1.0 - p));
}

double delta_log_odds_auc(double auc_multitask, double auc_singletask) {
  return logit(auc_multitask) - logit(auc_singletask);
}

}  // namespace vscreen::metrics
