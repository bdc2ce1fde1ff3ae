#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vscreen/data/collection.hpp"

namespace vscreen::data {

struct AorResult {
  double mean = 0.0;
  double stddev = 0.0;                // population std over actives
  std::vector<double> per_compound;   // one value per active, record order
};

// Active occurrence rate of dataset `id`: for each of its active compounds,
// the number of *other* datasets in which that compound is also active
// (identity under the collection's match mode). Datasets of exclude_group do
// not contribute to the counts. A dataset with no actives is an error.
AorResult active_occurrence_rate(const Collection& c, const std::string& id,
                                 std::optional<Group> exclude_group = {});

// entry (x, y) = |compounds(x) intersect compounds(y)| / |compounds(x)|,
// diagonal 1; indices follow c.datasets order.
std::vector<std::vector<double>> intersection_matrix(const Collection& c);

}  // namespace vscreen::data
