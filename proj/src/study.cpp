#include "vscreen/experiments/study.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "vscreen/core/csv.hpp"
#include "vscreen/core/hash.hpp"

namespace vscreen::experiments {

std::string StudyResult::spec_hash() const {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash_string(spec_json)));
  return buf;
}

void save_study_csv(const StudyResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write study CSV: " + path);
  out << "# study=" << r.study << " seed=" << r.seed
      << " spec_hash=" << r.spec_hash() << "\n";
  out << "study,run,rung,budget,dataset,fold,metric,value\n";
  char buf[64];
  for (const StudyRow& row : r.rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", row.value);
    out << csv_escape(row.study) << ',' << row.run << ',';
    if (row.rung >= 0) out << row.rung;
    out << ',';
    if (row.budget >= 0) out << row.budget;
    out << ',' << csv_escape(row.dataset) << ',';
    if (row.fold >= 0) out << row.fold;
    out << ',' << csv_escape(row.metric) << ',' << buf << '\n';
  }
}

void save_study_summary_json(const StudyResult& r, const std::string& path) {
  nlohmann::json doc = {{"study", r.study},
                        {"seed", r.seed},
                        {"spec_hash", r.spec_hash()},
                        {"spec", nlohmann::json::parse(r.spec_json)},
                        {"summary", r.summary},
                        {"rows", r.rows.size()}};
  std::ofstream out(path);
  if (!out) throw DataError("cannot write study summary: " + path);
  out << doc.dump(2) << "\n";
}

double study_metric_mean(const StudyResult& r, long long rung,
                         const std::string& metric, bool aggregate_only) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const StudyRow& row : r.rows) {
    if (row.rung != rung || row.metric != metric) continue;
    if (aggregate_only && !row.dataset.empty()) continue;
    sum += row.value;
    ++n;
  }
  if (n == 0) throw DataError("no study rows match " + metric);
  return sum / static_cast<double>(n);
}

}  // namespace vscreen::experiments
