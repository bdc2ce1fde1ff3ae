#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vscreen/data/collection.hpp"

namespace vscreen::data {

struct FoldAssignment {
  std::string dataset_id;
  int k = 0;
  std::vector<int> fold_of;  // record index -> fold in [0, k)
  bool low_active_warning = false;  // fewer actives than folds

  std::vector<std::size_t> fold_indices(int fold) const;
  std::vector<std::size_t> train_indices(int excluded_fold) const;
};

// Actives and inactives are shuffled independently by the seed and dealt
// round-robin, so every fold's class counts deviate from n/k by less than 1.
FoldAssignment stratified_kfold(const Dataset& d, int k, std::uint64_t seed);

// Per-dataset assignments with seeds derived from (seed, dataset id); the
// same call is reproducible and independent per dataset.
std::map<std::string, FoldAssignment> assign_folds(const Collection& c, int k,
                                                   std::uint64_t seed);

// Nested stratified subsets: for each requested size, the label mix matches
// the dataset (rounded) and every smaller subset is contained in every
// larger one. Sizes must be strictly increasing and feasible.
std::vector<std::vector<std::size_t>> sample_nested(
    const Dataset& d, const std::vector<std::size_t>& sizes,
    std::uint64_t seed);

}  // namespace vscreen::data
