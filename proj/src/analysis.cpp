#include "vscreen/data/analysis.hpp"

#include <cmath>
#include <set>
#include <unordered_set>

namespace vscreen::data {

AorResult active_occurrence_rate(const Collection& c, const std::string& id,
                                 std::optional<Group> exclude_group) {
  const Dataset& subject = c.dataset(id);
  if (subject.n_active() == 0)
    throw DataError(id + ": AOR is undefined for a dataset with no actives");

  // active-compound key sets of every other contributing dataset
  std::vector<std::unordered_set<std::string>> other_actives;
  for (const Dataset& d : c.datasets) {
    if (d.id == id) continue;
    if (exclude_group && d.group == *exclude_group) continue;
    std::unordered_set<std::string> keys;
    for (const Record& r : d.records)
      if (r.label != 0) keys.insert(c.compound_key(r));
    other_actives.push_back(std::move(keys));
  }

  AorResult result;
  for (const Record& r : subject.records) {
    if (r.label == 0) continue;
    const std::string key = c.compound_key(r);
    double count = 0.0;
    for (const auto& keys : other_actives)
      if (keys.count(key)) count += 1.0;
    result.per_compound.push_back(count);
  }

  double sum = 0.0;
  for (double v : result.per_compound) sum += v;
  result.mean = sum / static_cast<double>(result.per_compound.size());
  double sq = 0.0;
  for (double v : result.per_compound)
    sq += (v - result.mean) * (v - result.mean);
  result.stddev =
      std::sqrt(sq / static_cast<double>(result.per_compound.size()));
  return result;
}

std::vector<std::vector<double>> intersection_matrix(const Collection& c) {
  if (c.datasets.empty())
    throw DataError("intersection matrix of an empty collection");
  const std::size_t n = c.datasets.size();
  std::vector<std::set<std::string>> keys(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const Record& r : c.datasets[i].records)
      keys[i].insert(c.compound_key(r));

  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) {
        m[x][y] = 1.0;
        continue;
      }
      if (keys[x].empty()) continue;
      std::size_t inter = 0;
      for (const std::string& k : keys[x]) inter += keys[y].count(k);
      m[x][y] = static_cast<double>(inter) / static_cast<double>(keys[x].size());
    }
  }
  return m;
}

}  // namespace vscreen::data
