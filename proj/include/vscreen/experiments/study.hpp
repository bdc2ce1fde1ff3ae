#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vscreen/core/errors.hpp"

namespace vscreen::experiments {

// Long-format study output: one metric value per row. rung is the task
// count of the training collection; budget the additional-data allowance
// (tasks-vs-data only, -1 elsewhere); dataset and fold empty/-1 for
// aggregate rows.
struct StudyRow {
  std::string study;
  std::size_t run = 0;
  long long rung = -1;
  long long budget = -1;
  std::string dataset;
  int fold = -1;
  std::string metric;
  double value = 0.0;
};

struct StudyResult {
  std::string study;
  std::uint64_t seed = 0;
  std::string spec_json;          // the spec the run was built from
  std::vector<StudyRow> rows;
  std::map<std::string, double> summary;

  // Provenance tag: stable hash of spec_json, embedded in every output.
  std::string spec_hash() const;

  void add(std::size_t run, long long rung, long long budget,
           const std::string& dataset, int fold, const std::string& metric,
           double value) {
    rows.push_back({study, run, rung, budget, dataset, fold, metric, value});
  }
};

void save_study_csv(const StudyResult& r, const std::string& path);
void save_study_summary_json(const StudyResult& r, const std::string& path);

// Mean of the named metric over rows matching (rung, metric), aggregates
// only rows with dataset == "" when aggregate_only is set.
double study_metric_mean(const StudyResult& r, long long rung,
                         const std::string& metric, bool aggregate_only);

}  // namespace vscreen::experiments
