#pragma once

#include <map>
#include <string>
#include <vector>

#include "vscreen/metrics/ranking.hpp"

namespace vscreen::metrics {

// One fold-level metric value. Aggregates are always recomputed from these
// rows rather than stored, so report files cannot go stale against
// themselves.
struct EvalRow {
  std::string dataset;
  std::string group;
  int fold = 0;
  std::string metric;  // "auc" or "enrichment@<fpr>"
  double value = 0.0;
};

struct EvalReport {
  std::string model;
  int folds = 0;
  std::vector<EvalRow> rows;

  void add(const std::string& dataset, const std::string& group, int fold,
           const std::string& metric, double value) {
    rows.push_back({dataset, group, fold, metric, value});
  }
};

std::string enrichment_metric_name(double fpr);

// K-fold-average AUC per dataset (mean over that dataset's "auc" rows).
std::map<std::string, double> dataset_kfold_auc(const EvalReport& r);

// group -> mean/median of the per-dataset K-fold-average AUC.
std::map<std::string, MeanMedian> group_auc_summary(const EvalReport& r);

// group -> median across datasets of the fold-mean enrichment, per FPR name.
std::map<std::string, std::map<std::string, double>> group_enrichment_summary(
    const EvalReport& r);

std::string group_of_dataset(const EvalReport& r, const std::string& dataset);

void save_report_json(const EvalReport& r, const std::string& path);
EvalReport load_report_json(const std::string& path);

// Flat CSV: dataset,group,fold,metric,value.
void save_report_csv(const EvalReport& r, const std::string& path);

}  // namespace vscreen::metrics
