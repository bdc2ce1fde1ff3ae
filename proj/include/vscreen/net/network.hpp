#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vscreen/core/matrix.hpp"
#include "vscreen/core/rng.hpp"
#include "vscreen/net/config.hpp"

namespace vscreen::net {

// Inputs are binary fingerprints, passed as sorted indices of set bits. The
// first-layer pass and its gradient only touch those columns.
using SparseInput = std::span<const std::uint32_t>;

struct Layer {
  Matrix w;                // out x in
  std::vector<double> b;   // out
};

// Shared hidden stack plus one two-class softmax head per task. Heads are
// plain linear maps of the top hidden activation (no bias term).
struct MultitaskNetwork {
  NetworkConfig config;
  std::vector<Layer> layers;
  std::vector<Matrix> heads;  // each 2 x top_dim; row 1 scores "active"
  std::size_t step = 0;

  std::size_t top_dim() const {
    return config.hidden_sizes.empty() ? config.input_dim
                                       : config.hidden_sizes.back();
  }
  bool finite() const;
};

MultitaskNetwork init(const NetworkConfig& config);

// Probability of the "active" class for one input under the given head.
// train_mode applies inverted dropout using masks drawn from rng; evaluation
// applies neither dropout nor rescaling.
double forward(const MultitaskNetwork& net, SparseInput input,
               std::size_t task, bool train_mode = false, Rng* rng = nullptr);

struct Minibatch {
  std::vector<SparseInput> inputs;
  std::vector<std::size_t> task_ids;
  std::vector<int> labels;
  std::vector<double> weights;
  // Per-example dropout streams; empty means no dropout. Deriving these from
  // (seed, step, example) keeps multi-worker sharding exactly equivalent to
  // a single pass over the batch.
  std::vector<std::uint64_t> dropout_seeds;

  std::size_t size() const { return inputs.size(); }
};

struct Gradients {
  std::vector<Layer> layers;  // same shapes as the network
  std::vector<Matrix> heads;
  double loss = 0.0;          // mean over examples of weight * cross-entropy
  std::size_t count = 0;      // examples that produced this gradient
  double top_activation_max = 0.0;  // largest |top hidden activation| seen

  void scale(double factor);
};

// Mean-over-examples loss and gradient. Each example contributes only
// through its own task's head; an example of task t leaves every other
// head's gradient exactly zero. NaN activations raise NumericError.
Gradients loss_and_gradient(const MultitaskNetwork& net, const Minibatch& batch);

// Weighted average of per-shard mean gradients by example count. One
// aggregated step over disjoint shards of a batch reproduces the sequential
// step over the whole batch.
Gradients aggregate_gradients(const std::vector<Gradients>& shards);

// theta <- theta - lr * gradient.
void apply_update(MultitaskNetwork& net, const Gradients& g, double lr);

}  // namespace vscreen::net
