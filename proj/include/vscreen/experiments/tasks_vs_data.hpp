#pragma once

#include <cstdint>
#include <vector>

#include "vscreen/data/collection.hpp"
#include "vscreen/experiments/protocol.hpp"
#include "vscreen/experiments/study.hpp"
#include "vscreen/net/config.hpp"

namespace vscreen::experiments {

// Tasks-vs-data study: a grid over (number of added tasks) x (budget of
// additional data points), with the added data nested across budgets. The
// baseline is the net trained on the held-in datasets alone, seed-paired per
// (run, fold). Budgets a cell cannot satisfy are marked infeasible.
struct TasksVsDataSpec {
  std::vector<std::size_t> task_ladder;  // total task counts incl. held-in
  std::vector<std::size_t> budgets;      // additional data points, increasing
  std::size_t n_runs = 10;
  net::NetworkConfig net;
  StepPolicy steps;
  EvalProtocol protocol;
  std::uint64_t seed = 1;

  std::string to_json() const;
  static TasksVsDataSpec from_json(const std::string& text);
};

StudyResult run_tasks_vs_data(const TasksVsDataSpec& spec,
                              const data::Collection& c, unsigned threads);

}  // namespace vscreen::experiments
