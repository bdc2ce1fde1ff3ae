#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vscreen/data/collection.hpp"
#include "vscreen/data/folds.hpp"
#include "vscreen/net/network.hpp"

namespace vscreen::net {

// One pooled training example: the bit indices are copied out of the record
// fingerprints so training never touches the collection again.
struct TrainExample {
  std::vector<std::uint32_t> bits;
  std::size_t task = 0;
  int label = 0;
  double weight = 1.0;
};

struct TrainSet {
  std::vector<TrainExample> examples;
  std::vector<std::string> task_ids;  // task index -> dataset id
};

// Pools the training records of the given datasets. For each dataset,
// actives are weighted so their total weight equals the number of inactives
// (inactives get unit weight). When folds are provided, records of
// excluded_fold are left out; subset (dataset id -> record indices)
// restricts further when present.
TrainSet build_train_set(
    const data::Collection& c, const std::vector<std::string>& dataset_ids,
    const std::map<std::string, data::FoldAssignment>* folds = nullptr,
    int excluded_fold = -1,
    const std::map<std::string, std::vector<std::size_t>>* subset = nullptr);

struct StepLog {
  std::size_t step;
  double loss;
};

struct TrainOptions {
  std::vector<StepLog>* log = nullptr;
  // Called with (step, loss); returning false stops training early.
  std::function<bool(std::size_t, double)> on_log;
};

// Minibatch SGD over the pooled set: per-step batches are sampled uniformly
// with replacement from a stream derived from (seed, step), dropout masks
// from (seed, step, example). config.n_workers > 1 shards each batch across
// threads and aggregates, which matches the single-worker pass up to
// summation order. Detects NaN and a zeroed-out top hidden layer and raises
// NumericError instead of training through it.
void train(MultitaskNetwork& net, const TrainSet& ts,
           const TrainOptions& opts = {});

// Copies the hidden stack of `source` into a fresh network configured by
// `target` (which must have identical input/hidden shapes); the new heads
// are freshly initialized from target.seed.
MultitaskNetwork transplant(const MultitaskNetwork& source,
                            const NetworkConfig& target);

// Scores of the "active" head output for each record, evaluation mode.
std::vector<double> score_records(const MultitaskNetwork& net,
                                  const std::vector<data::Record>& records,
                                  const std::vector<std::size_t>& indices,
                                  std::size_t task);

}  // namespace vscreen::net
