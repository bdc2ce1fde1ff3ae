#include "vscreen/experiments/analysis.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include "json.hpp"
#include "vscreen/core/csv.hpp"
#include "vscreen/metrics/ranking.hpp"

namespace vscreen::experiments {

namespace {

// Datasets covered by both reports, in collection order, with the group
// filter applied.
std::vector<std::string> joined_datasets(const metrics::EvalReport& mt,
                                         const metrics::EvalReport& st,
                                         const data::Collection& c,
                                         std::optional<data::Group> exclude) {
  const auto mt_auc = metrics::dataset_kfold_auc(mt);
  const auto st_auc = metrics::dataset_kfold_auc(st);
  std::vector<std::string> ids;
  for (const data::Dataset& d : c.datasets) {
    if (exclude && d.group == *exclude) continue;
    const bool in_mt = mt_auc.count(d.id) != 0;
    const bool in_st = st_auc.count(d.id) != 0;
    if (in_mt != in_st)
      throw DataError("report coverage differs on dataset " + d.id);
    if (in_mt) ids.push_back(d.id);
  }
  if (ids.empty()) throw DataError("reports share no datasets");
  return ids;
}

}  // namespace

AorAnalysis run_aor_analysis(const metrics::EvalReport& multitask,
                             const metrics::EvalReport& singletask,
                             const data::Collection& c,
                             std::optional<data::Group> exclude_group) {
  const auto mt_auc = metrics::dataset_kfold_auc(multitask);
  const auto st_auc = metrics::dataset_kfold_auc(singletask);
  AorAnalysis out;
  for (const std::string& id :
       joined_datasets(multitask, singletask, c, exclude_group)) {
    const data::AorResult aor =
        data::active_occurrence_rate(c, id, exclude_group);
    AorPoint p;
    p.dataset = id;
    p.aor_mean = aor.mean;
    p.aor_std = aor.stddev;
    p.delta_log_odds =
        metrics::delta_log_odds_auc(mt_auc.at(id), st_auc.at(id));
    out.points.push_back(p);
  }

  // r^2 of the simple regression of delta on AOR
  const std::size_t n = out.points.size();
  double mx = 0.0, my = 0.0;
  for (const AorPoint& p : out.points) {
    mx += p.aor_mean;
    my += p.delta_log_odds;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const AorPoint& p : out.points) {
    sxx += (p.aor_mean - mx) * (p.aor_mean - mx);
    syy += (p.delta_log_odds - my) * (p.delta_log_odds - my);
    sxy += (p.aor_mean - mx) * (p.delta_log_odds - my);
  }
  out.r2 = (sxx <= 0.0 || syy <= 0.0) ? 0.0 : (sxy * sxy) / (sxx * syy);
  return out;
}

void save_aor_csv(const AorAnalysis& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write AOR table: " + path);
  out << "dataset,aor_mean,aor_std,delta_log_odds\n";
  char buf[128];
  for (const AorPoint& p : a.points) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g", p.aor_mean, p.aor_std,
                  p.delta_log_odds);
    out << csv_escape(p.dataset) << ',' << buf << '\n';
  }
  std::snprintf(buf, sizeof(buf), "%.10g", a.r2);
  out << "# r2=" << buf << "\n";
}

ClassDuplicateResult run_class_and_duplicate_analysis(
    const metrics::EvalReport& multitask,
    const metrics::EvalReport& singletask, const data::Collection& c,
    std::optional<data::Group> exclude_group) {
  const auto mt_auc = metrics::dataset_kfold_auc(multitask);
  const auto st_auc = metrics::dataset_kfold_auc(singletask);
  const auto ids = joined_datasets(multitask, singletask, c, exclude_group);

  std::map<std::string, std::vector<double>> per_class;
  std::map<std::string, std::size_t> class_count;
  for (const std::string& id : ids)
    ++class_count[c.dataset(id).target_class];

  std::vector<double> dup_delta, uniq_delta;
  stats::PairedSample dup_pair, uniq_pair;
  for (const std::string& id : ids) {
    const data::Dataset& d = c.dataset(id);
    const double delta =
        metrics::delta_log_odds_auc(mt_auc.at(id), st_auc.at(id));
    std::string cls = d.target_class;
    if (class_count[cls] < 5) cls = "miscellaneous";
    per_class[cls].push_back(delta);
    if (d.duplicate_target) {
      dup_delta.push_back(delta);
      dup_pair.a.push_back(mt_auc.at(id));
      dup_pair.b.push_back(st_auc.at(id));
    } else {
      uniq_delta.push_back(delta);
      uniq_pair.a.push_back(mt_auc.at(id));
      uniq_pair.b.push_back(st_auc.at(id));
    }
  }

  ClassDuplicateResult result;
  for (auto& [cls, deltas] : per_class) {
    ClassRow row;
    row.target_class = cls;
    row.n = deltas.size();
    double sum = 0.0;
    for (double v : deltas) sum += v;
    row.mean = sum / static_cast<double>(deltas.size());
    row.notch = stats::notch_interval(deltas);
    result.classes.push_back(std::move(row));
  }

  DuplicateAnalysis& dup = result.duplicates;
  dup.n_duplicate = dup_delta.size();
  dup.n_unique = uniq_delta.size();
  dup.applicable = !dup_delta.empty() && !uniq_delta.empty();
  if (dup.applicable) {
    double s = 0.0;
    for (double v : dup_delta) s += v;
    dup.mean_delta_duplicate = s / static_cast<double>(dup_delta.size());
    s = 0.0;
    for (double v : uniq_delta) s += v;
    dup.mean_delta_unique = s / static_cast<double>(uniq_delta.size());
    if (dup_delta.size() >= 2 && uniq_delta.size() >= 2)
      dup.welch_one_sided = stats::welch_t_test(dup_delta, uniq_delta, 1);
    dup.sign_duplicate = stats::sign_test_wilson(dup_pair);
    dup.sign_unique = stats::sign_test_wilson(uniq_pair);
  }
  return result;
}

void save_class_duplicate_json(const ClassDuplicateResult& r,
                               const std::string& path) {
  nlohmann::json classes = nlohmann::json::array();
  for (const ClassRow& row : r.classes)
    classes.push_back({{"target_class", row.target_class},
                       {"n", row.n},
                       {"mean_delta_log_odds", row.mean},
                       {"median", row.notch.median},
                       {"notch_lo", row.notch.lo},
                       {"notch_hi", row.notch.hi}});
  const DuplicateAnalysis& d = r.duplicates;
  nlohmann::json dup = {{"applicable", d.applicable},
                        {"n_duplicate", d.n_duplicate},
                        {"n_unique", d.n_unique}};
  if (d.applicable) {
    dup["mean_delta_duplicate"] = d.mean_delta_duplicate;
    dup["mean_delta_unique"] = d.mean_delta_unique;
    dup["welch_t"] = d.welch_one_sided.t;
    dup["welch_p_one_sided"] = d.welch_one_sided.p;
    dup["sign_duplicate_ci"] = {d.sign_duplicate.ci.lo, d.sign_duplicate.ci.hi};
    dup["sign_unique_ci"] = {d.sign_unique.ci.lo, d.sign_unique.ci.hi};
  } else {
    dup["note"] = "duplicate-vs-unique comparison skipped: one side is empty";
  }
  nlohmann::json doc = {{"classes", classes}, {"duplicates", dup}};
  std::ofstream out(path);
  if (!out) throw DataError("cannot write class analysis: " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace vscreen::experiments
