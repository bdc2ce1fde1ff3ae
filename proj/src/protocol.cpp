#include "vscreen/experiments/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "vscreen/core/hash.hpp"
#include "vscreen/core/parallel.hpp"

namespace vscreen::experiments {

std::size_t StepPolicy::steps_for(std::size_t pool_size,
                                  std::size_t batch_size) const {
  const double per_epoch =
      static_cast<double>(pool_size) / static_cast<double>(batch_size);
  const std::size_t steps =
      static_cast<std::size_t>(std::llround(epochs * per_epoch)) + floor_steps;
  return std::min(steps, cap);
}

void score_dataset_folds(const data::Collection& c, const std::string& id,
                         std::size_t task_index,
                         const data::FoldAssignment& fa,
                         const net::MultitaskNetwork& net, int fold,
                         bool with_enrichment, metrics::EvalReport& report) {
  const data::Dataset& d = c.dataset(id);
  const auto test = fa.fold_indices(fold);
  metrics::ScoredSet scored;
  scored.scores = net::score_records(net, d.records, test, task_index);
  scored.labels.reserve(test.size());
  for (std::size_t i : test) scored.labels.push_back(d.records[i].label);

  std::size_t pos = 0;
  for (int l : scored.labels) pos += static_cast<std::size_t>(l != 0);
  if (pos == 0 || pos == scored.labels.size()) return;  // single-class fold

  const std::string group = data::to_string(d.group);
  report.add(id, group, fold, "auc", metrics::roc_auc(scored));
  if (with_enrichment)
    for (double fpr : metrics::kEnrichmentFprGrid)
      report.add(id, group, fold, metrics::enrichment_metric_name(fpr),
                 metrics::roc_enrichment(scored, fpr));
}

metrics::EvalReport evaluate_multitask(const data::Collection& c,
                                       const std::vector<std::string>& ids,
                                       net::NetworkConfig cfg,
                                       const StepPolicy& steps,
                                       const EvalProtocol& protocol,
                                       const std::string& model_name) {
  cfg.input_dim = c.nbits;
  cfg.n_tasks = ids.size();
  const auto folds = data::assign_folds(c, protocol.folds, protocol.fold_seed);

  std::vector<metrics::EvalReport> per_fold(
      static_cast<std::size_t>(protocol.folds));
  parallel_for(static_cast<std::size_t>(protocol.folds), protocol.threads,
               [&](std::size_t k) {
                 const int fold = static_cast<int>(k);
                 net::NetworkConfig fold_cfg = cfg;
                 fold_cfg.seed = hash_combine(cfg.seed, 0xA110C + k);
                 net::TrainSet ts = net::build_train_set(c, ids, &folds, fold);
                 fold_cfg.n_steps =
                     steps.steps_for(ts.examples.size(), fold_cfg.batch_size);
                 net::MultitaskNetwork model = net::init(fold_cfg);
                 net::train(model, ts);
                 for (std::size_t t = 0; t < ids.size(); ++t)
                   score_dataset_folds(c, ids[t], t, folds.at(ids[t]), model,
                                       fold, protocol.with_enrichment,
                                       per_fold[k]);
               });

  metrics::EvalReport report;
  report.model = model_name;
  report.folds = protocol.folds;
  for (const auto& part : per_fold)
    report.rows.insert(report.rows.end(), part.rows.begin(), part.rows.end());
  std::sort(report.rows.begin(), report.rows.end(),
            [](const metrics::EvalRow& a, const metrics::EvalRow& b) {
              return std::tie(a.dataset, a.fold, a.metric) <
                     std::tie(b.dataset, b.fold, b.metric);
            });
  return report;
}

metrics::EvalReport evaluate_singletask(const data::Collection& c,
                                        const std::vector<std::string>& ids,
                                        net::NetworkConfig cfg,
                                        const StepPolicy& steps,
                                        const EvalProtocol& protocol,
                                        const std::string& model_name) {
  cfg.input_dim = c.nbits;
  cfg.n_tasks = 1;
  const auto folds = data::assign_folds(c, protocol.folds, protocol.fold_seed);

  const std::size_t cells = ids.size() * static_cast<std::size_t>(protocol.folds);
  std::vector<metrics::EvalReport> per_cell(cells);
  parallel_for(cells, protocol.threads, [&](std::size_t cell) {
    const std::size_t t = cell / static_cast<std::size_t>(protocol.folds);
    const int fold = static_cast<int>(cell % static_cast<std::size_t>(protocol.folds));
    net::NetworkConfig cell_cfg = cfg;
    cell_cfg.seed = hash_combine(hash_combine(cfg.seed, hash_string(ids[t])),
                                 0x51 + static_cast<std::size_t>(fold));
    const std::vector<std::string> single{ids[t]};
    net::TrainSet ts = net::build_train_set(c, single, &folds, fold);
    cell_cfg.n_steps = steps.steps_for(ts.examples.size(), cell_cfg.batch_size);
    net::MultitaskNetwork model = net::init(cell_cfg);
    net::train(model, ts);
    score_dataset_folds(c, ids[t], 0, folds.at(ids[t]), model, fold,
                        protocol.with_enrichment, per_cell[cell]);
  });

  metrics::EvalReport report;
  report.model = model_name;
  report.folds = protocol.folds;
  for (const auto& part : per_cell)
    report.rows.insert(report.rows.end(), part.rows.begin(), part.rows.end());
  std::sort(report.rows.begin(), report.rows.end(),
            [](const metrics::EvalRow& a, const metrics::EvalRow& b) {
              return std::tie(a.dataset, a.fold, a.metric) <
                     std::tie(b.dataset, b.fold, b.metric);
            });
  return report;
}

}  // namespace vscreen::experiments
