#include "vscreen/experiments/tasks_vs_data.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "vscreen/core/hash.hpp"
#include "vscreen/core/parallel.hpp"
#include "vscreen/core/rng.hpp"
#include "vscreen/metrics/ranking.hpp"

namespace vscreen::experiments {

using nlohmann::json;

std::string TasksVsDataSpec::to_json() const {
  json doc = {{"study", "tasks_vs_data"},
              {"task_ladder", task_ladder},
              {"budgets", budgets},
              {"n_runs", n_runs},
              {"net", json::parse(net.to_json())},
              {"steps",
               {{"epochs", steps.epochs},
                {"floor_steps", steps.floor_steps},
                {"cap", steps.cap}}},
              {"folds", protocol.folds},
              {"fold_seed", protocol.fold_seed},
              {"seed", seed}};
  return doc.dump();
}

TasksVsDataSpec TasksVsDataSpec::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad tasks-vs-data spec: ") + e.what());
  }
  TasksVsDataSpec spec;
  if (doc.contains("task_ladder"))
    spec.task_ladder = doc["task_ladder"].get<std::vector<std::size_t>>();
  if (doc.contains("budgets"))
    spec.budgets = doc["budgets"].get<std::vector<std::size_t>>();
  spec.n_runs = doc.value("n_runs", spec.n_runs);
  if (doc.contains("net"))
    spec.net = net::NetworkConfig::from_json(doc["net"].dump());
  if (doc.contains("steps")) {
    spec.steps.epochs = doc["steps"].value("epochs", spec.steps.epochs);
    spec.steps.floor_steps = doc["steps"].value("floor_steps", spec.steps.floor_steps);
    spec.steps.cap = doc["steps"].value("cap", spec.steps.cap);
  }
  spec.protocol.folds = doc.value("folds", spec.protocol.folds);
  spec.protocol.fold_seed = doc.value("fold_seed", spec.protocol.fold_seed);
  spec.seed = doc.value("seed", spec.seed);
  return spec;
}

namespace {

double mean_ignoring_nan(const std::vector<double>& v) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : v)
    if (!std::isnan(x)) {
      sum += x;
      ++n;
    }
  return n == 0 ? NAN : sum / static_cast<double>(n);
}

}  // namespace

StudyResult run_tasks_vs_data(const TasksVsDataSpec& spec,
                              const data::Collection& c, unsigned threads) {
  if (c.held_in.empty())
    throw DataError("tasks-vs-data requires a held_in set in the collection");
  const std::vector<std::string>& held_in = c.held_in;
  const std::size_t n_held = held_in.size();

  std::vector<std::string> pool;
  for (const data::Dataset& d : c.datasets) {
    bool reserved = false;
    for (const std::string& id : held_in) reserved |= id == d.id;
    for (const std::string& id : c.held_out) reserved |= id == d.id;
    if (!reserved) pool.push_back(d.id);
  }

  std::vector<std::size_t> ladder = spec.task_ladder;
  if (ladder.empty()) ladder = {n_held, n_held + pool.size()};
  if (ladder.front() < n_held)
    throw DataError("task ladder must include the held-in tasks");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i] <= ladder[i - 1])
      throw DataError("task ladder must be strictly increasing");
  if (ladder.back() > n_held + pool.size())
    throw DataError("task ladder exceeds available tasks");
  std::vector<std::size_t> budgets = spec.budgets;
  if (budgets.empty()) throw DataError("tasks-vs-data needs a budget list");
  for (std::size_t i = 1; i < budgets.size(); ++i)
    if (budgets[i] <= budgets[i - 1])
      throw DataError("budgets must be strictly increasing");

  const int K = spec.protocol.folds;
  const auto folds = data::assign_folds(c, K, spec.protocol.fold_seed);
  const std::size_t n_runs = spec.n_runs;
  const std::size_t n_rungs = ladder.size();
  const std::size_t n_budgets = budgets.size();

  std::vector<std::vector<std::string>> order(n_runs, pool);
  for (std::size_t r = 0; r < n_runs; ++r) {
    Rng rng(hash_combine(hash_combine(spec.seed, 0x7A5C5ULL), r));
    rng.shuffle(order[r]);
  }

  // cell = (run, rung, budget); baseline = (run, fold) held-in only
  struct Cell {
    bool feasible = true;
    std::vector<double> held_auc;  // mean over held-in datasets, per fold
    std::vector<std::vector<double>> per_dataset;  // [dataset][fold]
  };
  std::vector<Cell> cells(n_runs * n_rungs * n_budgets);
  std::vector<std::vector<std::vector<double>>> base_auc(
      n_runs, std::vector<std::vector<double>>(
                  n_held, std::vector<double>(static_cast<std::size_t>(K), NAN)));

  auto cell_at = [&](std::size_t r, std::size_t g, std::size_t b) -> Cell& {
    return cells[(r * n_rungs + g) * n_budgets + b];
  };

  // precompute feasibility and the nested subsets per (run, rung)
  // subsets[r][g][budget] : dataset id -> record indices
  using SubsetMap = std::map<std::string, std::vector<std::size_t>>;
  std::vector<std::vector<std::vector<SubsetMap>>> subsets(
      n_runs, std::vector<std::vector<SubsetMap>>(
                  n_rungs, std::vector<SubsetMap>(n_budgets)));
  for (std::size_t r = 0; r < n_runs; ++r) {
    for (std::size_t g = 0; g < n_rungs; ++g) {
      const std::size_t n_extra = ladder[g] - n_held;
      std::vector<std::string> extra(order[r].begin(),
                                     order[r].begin() + n_extra);
      std::size_t available = 0;
      for (const std::string& id : extra)
        available += c.dataset(id).records.size();
      for (std::size_t b = 0; b < n_budgets; ++b) {
        Cell& cell = cell_at(r, g, b);
        if (budgets[b] > available || (n_extra == 0 && budgets[b] > 0)) {
          cell.feasible = false;
          continue;
        }
      }
      if (n_extra == 0) continue;
      // proportional allocation, nested across budgets via shared shuffles
      for (const std::string& id : extra) {
        const data::Dataset& d = c.dataset(id);
        std::vector<std::size_t> sizes;
        std::vector<std::size_t> budget_of_size;
        for (std::size_t b = 0; b < n_budgets; ++b) {
          if (!cell_at(r, g, b).feasible) continue;
          double share = static_cast<double>(d.records.size()) /
                         static_cast<double>(available);
          std::size_t size = static_cast<std::size_t>(
              std::llround(share * static_cast<double>(budgets[b])));
          size = std::min(size, d.records.size());
          sizes.push_back(size);
          budget_of_size.push_back(b);
        }
        // strictly increasing subsequence for sample_nested; equal or zero
        // sizes reuse the previous chain entry
        std::vector<std::size_t> distinct;
        for (std::size_t s : sizes)
          if (s > 0 && (distinct.empty() || s > distinct.back()))
            distinct.push_back(s);
        std::vector<std::vector<std::size_t>> chains;
        if (!distinct.empty())
          chains = data::sample_nested(
              d, distinct,
              hash_combine(hash_combine(spec.seed, hash_string(id)), r));
        for (std::size_t si = 0; si < sizes.size(); ++si) {
          if (sizes[si] == 0) {
            subsets[r][g][budget_of_size[si]][id] = {};
            continue;
          }
          // the largest chain entry not exceeding this size
          std::size_t pick = 0;
          for (std::size_t ci = 0; ci < distinct.size(); ++ci)
            if (distinct[ci] <= sizes[si]) pick = ci;
          subsets[r][g][budget_of_size[si]][id] = chains[pick];
        }
      }
    }
  }

  // jobs: baselines (run x fold) then cells (run x rung x budget x fold)
  const std::size_t base_jobs = n_runs * static_cast<std::size_t>(K);
  const std::size_t cell_jobs = cells.size() * static_cast<std::size_t>(K);
  for (Cell& cell : cells) {
    cell.held_auc.assign(static_cast<std::size_t>(K), NAN);
    cell.per_dataset.assign(n_held,
                            std::vector<double>(static_cast<std::size_t>(K), NAN));
  }

  parallel_for(base_jobs + cell_jobs, threads, [&](std::size_t job) {
    if (job < base_jobs) {
      const std::size_t r = job / K;
      const int fold = static_cast<int>(job % K);
      net::NetworkConfig cfg = spec.net;
      cfg.input_dim = c.nbits;
      cfg.n_tasks = n_held;
      cfg.seed = hash_combine(hash_combine(spec.seed, 0xBA5Eu + r),
                              static_cast<std::size_t>(fold));
      net::TrainSet ts = net::build_train_set(c, held_in, &folds, fold);
      cfg.n_steps = spec.steps.steps_for(ts.examples.size(), cfg.batch_size);
      net::MultitaskNetwork model = net::init(cfg);
      net::train(model, ts);
      for (std::size_t d = 0; d < n_held; ++d) {
        metrics::EvalReport tmp;
        score_dataset_folds(c, held_in[d], d, folds.at(held_in[d]), model,
                            fold, false, tmp);
        for (const metrics::EvalRow& row : tmp.rows)
          if (row.metric == "auc") base_auc[r][d][fold] = row.value;
      }
    } else {
      const std::size_t j = job - base_jobs;
      const std::size_t cell_idx = j / K;
      const int fold = static_cast<int>(j % K);
      const std::size_t r = cell_idx / (n_rungs * n_budgets);
      const std::size_t g = (cell_idx / n_budgets) % n_rungs;
      const std::size_t b = cell_idx % n_budgets;
      Cell& cell = cells[cell_idx];
      if (!cell.feasible) return;

      const std::size_t n_extra = ladder[g] - n_held;
      std::vector<std::string> ids = held_in;
      ids.insert(ids.end(), order[r].begin(), order[r].begin() + n_extra);

      net::NetworkConfig cfg = spec.net;
      cfg.input_dim = c.nbits;
      cfg.n_tasks = ids.size();
      cfg.seed = hash_combine(
          hash_combine(hash_combine(spec.seed, 0xCE11u + r), cell_idx),
          static_cast<std::size_t>(fold));
      net::TrainSet ts =
          net::build_train_set(c, ids, &folds, fold, &subsets[r][g][b]);
      cfg.n_steps = spec.steps.steps_for(ts.examples.size(), cfg.batch_size);
      net::MultitaskNetwork model = net::init(cfg);
      net::train(model, ts);
      std::vector<double> per_fold(n_held, NAN);
      for (std::size_t d = 0; d < n_held; ++d) {
        metrics::EvalReport tmp;
        score_dataset_folds(c, held_in[d], d, folds.at(held_in[d]), model,
                            fold, false, tmp);
        for (const metrics::EvalRow& row : tmp.rows)
          if (row.metric == "auc") {
            cell.per_dataset[d][fold] = row.value;
            per_fold[d] = row.value;
          }
      }
      cell.held_auc[fold] = mean_ignoring_nan(per_fold);
    }
  });

  StudyResult result;
  result.study = "tasks_vs_data";
  result.seed = spec.seed;
  result.spec_json = spec.to_json();

  for (std::size_t r = 0; r < n_runs; ++r) {
    std::vector<double> base_means;  // per-fold mean over held-in
    for (int k = 0; k < K; ++k) {
      std::vector<double> col;
      for (std::size_t d = 0; d < n_held; ++d) col.push_back(base_auc[r][d][k]);
      base_means.push_back(mean_ignoring_nan(col));
    }
    const double baseline = mean_ignoring_nan(base_means);
    result.add(r, static_cast<long long>(n_held), 0, "", -1,
               "baseline_mean_auc", baseline);

    for (std::size_t g = 0; g < n_rungs; ++g) {
      for (std::size_t b = 0; b < n_budgets; ++b) {
        const Cell& cell = cell_at(r, g, b);
        const long long rung = static_cast<long long>(ladder[g]);
        const long long budget = static_cast<long long>(budgets[b]);
        if (!cell.feasible) {
          result.add(r, rung, budget, "", -1, "infeasible", 1.0);
          continue;
        }
        const double mean_auc = mean_ignoring_nan(cell.held_auc);
        result.add(r, rung, budget, "", -1, "mean_auc", mean_auc);
        result.add(r, rung, budget, "", -1, "delta_mean_auc",
                   mean_auc - baseline);
        for (std::size_t d = 0; d < n_held; ++d) {
          const double auc = mean_ignoring_nan(cell.per_dataset[d]);
          if (!std::isnan(auc))
            result.add(r, rung, budget, held_in[d], -1, "auc_multitask", auc);
        }
      }
    }
  }

  // cross-run mean delta per (rung, budget)
  for (std::size_t g = 0; g < n_rungs; ++g) {
    for (std::size_t b = 0; b < n_budgets; ++b) {
      std::vector<double> deltas;
      bool any_feasible = false;
      for (std::size_t r = 0; r < n_runs; ++r) {
        const Cell& cell = cell_at(r, g, b);
        if (!cell.feasible) continue;
        any_feasible = true;
      }
      for (const StudyRow& row : result.rows)
        if (row.metric == "delta_mean_auc" &&
            row.rung == static_cast<long long>(ladder[g]) &&
            row.budget == static_cast<long long>(budgets[b]))
          deltas.push_back(row.value);
      char key[64];
      std::snprintf(key, sizeof(key), "rung_%zu_budget_%zu_mean_delta",
                    ladder[g], budgets[b]);
      result.summary[key] = any_feasible ? mean_ignoring_nan(deltas) : NAN;
    }
  }
  return result;
}

}  // namespace vscreen::experiments
