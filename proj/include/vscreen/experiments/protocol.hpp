#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vscreen/data/collection.hpp"
#include "vscreen/data/folds.hpp"
#include "vscreen/metrics/report.hpp"
#include "vscreen/net/train.hpp"

namespace vscreen::experiments {

// How many SGD steps a training pool gets: a fixed number of passes over the
// pool plus a constant floor, capped. The floor keeps small pools training
// long enough to stabilize.
struct StepPolicy {
  double epochs = 5.0;
  std::size_t floor_steps = 500;
  std::size_t cap = 200000;

  std::size_t steps_for(std::size_t pool_size, std::size_t batch_size) const;
};

// Shared cross-validation settings. fold_seed fixes the per-dataset fold
// assignments, so two evaluations with the same protocol are seed-paired.
struct EvalProtocol {
  int folds = 5;
  std::uint64_t fold_seed = 0xF01D5EEDULL;
  bool with_enrichment = false;
  unsigned threads = 1;
};

// K-fold evaluation of one multitask net over the given datasets: for every
// fold k, trains on folds != k of every dataset and scores each dataset's
// fold k. Emits an "auc" row per (dataset, fold); folds whose test split is
// single-class are skipped. cfg.n_tasks and input_dim are set here.
metrics::EvalReport evaluate_multitask(const data::Collection& c,
                                       const std::vector<std::string>& ids,
                                       net::NetworkConfig cfg,
                                       const StepPolicy& steps,
                                       const EvalProtocol& protocol,
                                       const std::string& model_name);

// Same protocol with an independent single-task net per (dataset, fold),
// fold assignments shared with evaluate_multitask for pairing.
metrics::EvalReport evaluate_singletask(const data::Collection& c,
                                        const std::vector<std::string>& ids,
                                        net::NetworkConfig cfg,
                                        const StepPolicy& steps,
                                        const EvalProtocol& protocol,
                                        const std::string& model_name);

// Scores fold `fold` of dataset `id` with the given net (head task_index)
// and appends the rows; a single-class test fold adds nothing.
void score_dataset_folds(const data::Collection& c, const std::string& id,
                         std::size_t task_index,
                         const data::FoldAssignment& fa,
                         const net::MultitaskNetwork& net, int fold,
                         bool with_enrichment, metrics::EvalReport& report);

}  // namespace vscreen::experiments
