#include "vscreen/data/folds.hpp"

#include <cmath>

#include "vscreen/core/hash.hpp"
#include "vscreen/core/rng.hpp"

namespace vscreen::data {

std::vector<std::size_t> FoldAssignment::fold_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(int excluded_fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != excluded_fold) out.push_back(i);
  return out;
}

FoldAssignment stratified_kfold(const Dataset& d, int k, std::uint64_t seed) {
  if (k < 2) throw DataError("stratified_kfold requires k >= 2");
  if (static_cast<std::size_t>(k) > d.records.size())
    throw DataError(d.id + ": k exceeds record count");

  std::vector<std::size_t> actives, inactives;
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    if (d.records[i].label != 0) actives.push_back(i);
    else inactives.push_back(i);
  }

  Rng rng(seed);
  rng.shuffle(actives);
  rng.shuffle(inactives);

  FoldAssignment fa;
  fa.dataset_id = d.id;
  fa.k = k;
  fa.fold_of.assign(d.records.size(), 0);
  fa.low_active_warning = actives.size() < static_cast<std::size_t>(k);
  for (std::size_t i = 0; i < actives.size(); ++i)
    fa.fold_of[actives[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < inactives.size(); ++i)
    fa.fold_of[inactives[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  return fa;
}

std::map<std::string, FoldAssignment> assign_folds(const Collection& c, int k,
                                                   std::uint64_t seed) {
  std::map<std::string, FoldAssignment> out;
  for (const Dataset& d : c.datasets)
    out[d.id] = stratified_kfold(d, k, hash_combine(seed, hash_string(d.id)));
  return out;
}

std::vector<std::vector<std::size_t>> sample_nested(
    const Dataset& d, const std::vector<std::size_t>& sizes,
    std::uint64_t seed) {
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1])
      throw DataError("sample_nested sizes must be strictly increasing");
  if (!sizes.empty() && sizes.back() > d.records.size())
    throw DataError(d.id + ": nested sample size exceeds record count");

  std::vector<std::size_t> actives, inactives;
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    if (d.records[i].label != 0) actives.push_back(i);
    else inactives.push_back(i);
  }
  Rng rng(seed);
  rng.shuffle(actives);
  rng.shuffle(inactives);

  const double active_frac =
      static_cast<double>(actives.size()) / static_cast<double>(d.records.size());

  std::vector<std::vector<std::size_t>> out;
  for (std::size_t size : sizes) {
    // prefix-taking from the shuffled pools keeps the chain nested; the
    // rounded active share is monotone in the subset size
    std::size_t n_active = static_cast<std::size_t>(
        std::llround(static_cast<double>(size) * active_frac));
    n_active = std::min(n_active, actives.size());
    n_active = std::max(n_active, size > inactives.size() ? size - inactives.size() : 0);
    const std::size_t n_inactive = size - n_active;
    std::vector<std::size_t> subset(actives.begin(), actives.begin() + n_active);
    subset.insert(subset.end(), inactives.begin(), inactives.begin() + n_inactive);
    out.push_back(std::move(subset));
  }
  return out;
}

}  // namespace vscreen::data
