#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vscreen/data/collection.hpp"
#include "vscreen/experiments/protocol.hpp"
#include "vscreen/experiments/study.hpp"
#include "vscreen/net/config.hpp"

namespace vscreen::experiments {

// Growth-curve study: trains multitask nets on nested task collections that
// all contain the held-in set, comparing each rung against seed-paired
// single-task baselines on the held-in datasets.
struct GrowthCurveSpec {
  // Task counts per rung; empty derives {held_in, 2*held_in, ...capped}.
  // The first rung must equal the held-in count and each rung's task set is
  // a superset of the previous one (tasks are added cumulatively at random).
  std::vector<std::size_t> ladder;
  std::size_t n_runs = 10;
  net::NetworkConfig net;      // multitask nets; also the baseline shape
  StepPolicy steps;
  EvalProtocol protocol;
  std::uint64_t seed = 1;
  std::string checkpoint_dir;  // when set, saves every (run, rung, fold) net

  std::string to_json() const;
  static GrowthCurveSpec from_json(const std::string& text);
};

// Default desk-scale architecture for study nets: a small pyramid.
net::NetworkConfig desk_study_net();

StudyResult run_growth_curve(const GrowthCurveSpec& spec,
                             const data::Collection& c, unsigned threads);

std::string growth_checkpoint_name(std::size_t run, std::size_t rung,
                                   int fold);

}  // namespace vscreen::experiments
