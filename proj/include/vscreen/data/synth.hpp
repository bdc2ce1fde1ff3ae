#pragma once

#include <cstdint>

#include "vscreen/data/collection.hpp"

namespace vscreen::data {

// Synthetic desk-scale collection. Every dataset labels the same compound
// universe. A compound may carry one implanted "motif" (a small set of bit
// positions); a task's actives are the carriers of its private motif or of
// any shared motif wired to it. Wiring is graded across tasks, from no
// shared motifs to all of them, so tasks differ in how much of their active
// set is shared with the rest of the collection. That grading drives the
// cross-task transfer structure and the spread of active occurrence rates.
struct SynthSpec {
  std::size_t n_tasks = 20;
  std::size_t n_compounds = 5000;
  double active_rate = 0.02;       // in (0, 0.5]
  std::size_t shared_motif_count = 8;
  std::uint64_t seed = 1;

  std::size_t nbits = 256;
  double bg_density = 0.05;        // background bit probability
  std::size_t motif_bits = 4;      // bits per motif
  double sigma_max = 0.9;          // top task's shared fraction of actives
  double flip_rate = 0.0;          // symmetric label noise per (task, compound)
  std::size_t held_in_count = 10;  // clamped to n_tasks

  // Extra single-task datasets appended as held_out: "shared" ones are wired
  // to every shared motif, "disjoint" ones only to a private motif.
  std::size_t n_holdout_shared = 0;
  std::size_t n_holdout_disjoint = 0;

  // Pairs of main tasks given identical label rules (same private motif and
  // wiring); both members are flagged duplicate_target.
  std::size_t n_duplicate_pairs = 0;
};

Collection synth_collection(const SynthSpec& spec);

}  // namespace vscreen::data
