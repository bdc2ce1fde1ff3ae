#include "vscreen/metrics/report.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "vscreen/core/csv.hpp"

namespace vscreen::metrics {

using nlohmann::json;

std::string enrichment_metric_name(double fpr) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "enrichment@%g", fpr);
  return buf;
}

std::map<std::string, double> dataset_kfold_auc(const EvalReport& r) {
  std::map<std::string, std::vector<double>> per_dataset;
  for (const EvalRow& row : r.rows)
    if (row.metric == "auc") per_dataset[row.dataset].push_back(row.value);
  std::map<std::string, double> out;
  for (auto& [dataset, values] : per_dataset)
    out[dataset] = kfold_average(values);
  return out;
}

std::string group_of_dataset(const EvalReport& r, const std::string& dataset) {
  for (const EvalRow& row : r.rows)
    if (row.dataset == dataset) return row.group;
  throw DataError("dataset not present in report: " + dataset);
}

std::map<std::string, MeanMedian> group_auc_summary(const EvalReport& r) {
  std::map<std::string, std::vector<double>> per_group;
  for (const auto& [dataset, auc] : dataset_kfold_auc(r))
    per_group[group_of_dataset(r, dataset)].push_back(auc);
  std::map<std::string, MeanMedian> out;
  for (auto& [group, values] : per_group) out[group] = mean_median(values);
  return out;
}

std::map<std::string, std::map<std::string, double>> group_enrichment_summary(
    const EvalReport& r) {
  // dataset -> metric -> fold values
  std::map<std::pair<std::string, std::string>, std::vector<double>> cells;
  std::map<std::string, std::string> group_of;
  for (const EvalRow& row : r.rows) {
    if (row.metric.rfind("enrichment@", 0) != 0) continue;
    cells[{row.dataset, row.metric}].push_back(row.value);
    group_of[row.dataset] = row.group;
  }
  std::map<std::string, std::map<std::string, std::vector<double>>> fold_means;
  for (auto& [key, values] : cells)
    fold_means[group_of[key.first]][key.second].push_back(
        kfold_average(values));
  std::map<std::string, std::map<std::string, double>> out;
  for (auto& [group, metrics] : fold_means)
    for (auto& [metric, values] : metrics)
      out[group][metric] = mean_median(values).median;
  return out;
}

void save_report_json(const EvalReport& r, const std::string& path) {
  json rows = json::array();
  for (const EvalRow& row : r.rows)
    rows.push_back({{"dataset", row.dataset},
                    {"group", row.group},
                    {"fold", row.fold},
                    {"metric", row.metric},
                    {"value", row.value}});
  json doc = {{"model", r.model}, {"folds", r.folds}, {"rows", rows}};
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path);
  out << doc.dump(2) << "\n";
}

EvalReport load_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open report: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  EvalReport r;
  r.model = doc.at("model").get<std::string>();
  r.folds = doc.at("folds").get<int>();
  for (const json& row : doc.at("rows"))
    r.rows.push_back({row.at("dataset").get<std::string>(),
                      row.at("group").get<std::string>(),
                      row.at("fold").get<int>(),
                      row.at("metric").get<std::string>(),
                      row.at("value").get<double>()});
  return r;
}

void save_report_csv(const EvalReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path);
  out << "dataset,group,fold,metric,value\n";
  char buf[64];
  for (const EvalRow& row : r.rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", row.value);
    out << csv_escape(row.dataset) << ',' << csv_escape(row.group) << ','
        << row.fold << ',' << csv_escape(row.metric) << ',' << buf << '\n';
  }
}

}  // namespace vscreen::metrics
