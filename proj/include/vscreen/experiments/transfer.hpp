#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "vscreen/data/collection.hpp"
#include "vscreen/experiments/protocol.hpp"
#include "vscreen/experiments/study.hpp"
#include "vscreen/net/config.hpp"

namespace vscreen::experiments {

// Transfer study: single-task nets for the held-out datasets are initialized
// from the hidden layers of multitask source nets and fine-tuned, then
// compared against freshly initialized seed-paired baselines. Negative
// deltas are expected for unrelated tasks and reported as-is.
struct TransferSpec {
  // Source task counts; each must be coverable by the non-held-out tasks.
  // Empty means a single rung using every available source task.
  std::vector<std::size_t> rungs;
  std::size_t n_runs = 10;
  net::NetworkConfig net;    // architecture shared by sources and baselines
  StepPolicy source_steps;   // multitask source training
  StepPolicy fine_tune_steps;
  EvalProtocol protocol;
  std::uint64_t seed = 1;

  std::string to_json() const;
  static TransferSpec from_json(const std::string& text);
};

// Provides the multitask source net for (run, rung task count, fold), e.g.
// loaded from growth-curve checkpoints. May be empty: sources are then
// trained in place on cumulative random task subsets, mirroring the
// growth-curve construction.
using SourceProvider =
    std::function<net::MultitaskNetwork(std::size_t run, std::size_t rung,
                                        int fold)>;

StudyResult run_transfer(const TransferSpec& spec, const data::Collection& c,
                         const SourceProvider& sources, unsigned threads);

}  // namespace vscreen::experiments
