#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vscreen/core/errors.hpp"

namespace vscreen::net {

// Training and architecture settings. Defaults follow the reference setup:
// pyramidal (2000, 100) hidden layers, dropout 0.25, learning rate 3e-4,
// batch 128, N(0, 0.01^2) weights and 0.5 biases.
struct NetworkConfig {
  std::size_t input_dim = 1024;
  std::vector<std::size_t> hidden_sizes = {2000, 100};  // empty: softmax on raw input
  std::size_t n_tasks = 1;
  double dropout_rate = 0.25;
  bool dropout_all_layers = true;  // false: first hidden layer only
  double learning_rate = 0.0003;
  std::size_t batch_size = 128;
  std::size_t n_steps = 10000;
  double init_std = 0.01;
  double init_bias = 0.5;
  std::uint64_t seed = 0;
  // (step, rate): rate takes effect at that step, overriding learning_rate.
  std::vector<std::pair<std::size_t, double>> lr_schedule;
  unsigned n_workers = 1;
  std::size_t log_every = 100;

  void validate() const {
    if (input_dim == 0) throw DataError("input_dim must be positive");
    if (n_tasks == 0) throw DataError("n_tasks must be positive");
    for (std::size_t h : hidden_sizes)
      if (h == 0) throw DataError("hidden layer sizes must be positive");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
      throw DataError("dropout_rate must lie in [0,1)");
    if (learning_rate <= 0.0) throw DataError("learning_rate must be positive");
    if (batch_size == 0) throw DataError("batch_size must be positive");
    if (init_std < 0.0) throw DataError("init_std must be non-negative");
  }

  std::string to_json() const;
  static NetworkConfig from_json(const std::string& text);
};

}  // namespace vscreen::net
