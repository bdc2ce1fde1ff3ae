#include "vscreen/experiments/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "vscreen/core/hash.hpp"
#include "vscreen/core/parallel.hpp"
#include "vscreen/core/rng.hpp"
#include "vscreen/metrics/ranking.hpp"

namespace vscreen::experiments {

using nlohmann::json;

std::string TransferSpec::to_json() const {
  json doc = {{"study", "transfer"},
              {"rungs", rungs},
              {"n_runs", n_runs},
              {"net", json::parse(net.to_json())},
              {"source_steps",
               {{"epochs", source_steps.epochs},
                {"floor_steps", source_steps.floor_steps},
                {"cap", source_steps.cap}}},
              {"fine_tune_steps",
               {{"epochs", fine_tune_steps.epochs},
                {"floor_steps", fine_tune_steps.floor_steps},
                {"cap", fine_tune_steps.cap}}},
              {"folds", protocol.folds},
              {"fold_seed", protocol.fold_seed},
              {"seed", seed}};
  return doc.dump();
}

TransferSpec TransferSpec::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad transfer spec: ") + e.what());
  }
  TransferSpec spec;
  if (doc.contains("rungs"))
    spec.rungs = doc["rungs"].get<std::vector<std::size_t>>();
  spec.n_runs = doc.value("n_runs", spec.n_runs);
  if (doc.contains("net"))
    spec.net = net::NetworkConfig::from_json(doc["net"].dump());
  auto read_steps = [&](const char* key, StepPolicy& p) {
    if (!doc.contains(key)) return;
    p.epochs = doc[key].value("epochs", p.epochs);
    p.floor_steps = doc[key].value("floor_steps", p.floor_steps);
    p.cap = doc[key].value("cap", p.cap);
  };
  read_steps("source_steps", spec.source_steps);
  read_steps("fine_tune_steps", spec.fine_tune_steps);
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

StudyResult run_transfer(const TransferSpec& spec, const data::Collection& c,
                         const SourceProvider& sources, unsigned threads) {
  if (c.held_out.empty())
    throw DataError("transfer requires a held_out set in the collection");
  const std::vector<std::string>& held_out = c.held_out;
  const std::size_t n_out = held_out.size();

  // source task pool: everything that is not held out
  std::vector<std::string> pool;
  for (const data::Dataset& d : c.datasets) {
    bool out = false;
    for (const std::string& id : held_out) out |= id == d.id;
    if (!out) pool.push_back(d.id);
  }

  std::vector<std::size_t> rungs = spec.rungs;
  if (rungs.empty()) rungs = {pool.size()};
  for (std::size_t rung : rungs)
    if (rung == 0 || rung > pool.size())
      throw DataError("transfer rung exceeds available source tasks");

  const int K = spec.protocol.folds;
  const auto folds = data::assign_folds(c, K, spec.protocol.fold_seed);
  const std::size_t n_runs = spec.n_runs;
  const std::size_t n_rungs = rungs.size();

  // cumulative task order per run, mirroring the growth-curve construction
  std::vector<std::vector<std::string>> order(n_runs, pool);
  for (std::size_t r = 0; r < n_runs; ++r) {
    Rng rng(hash_combine(hash_combine(spec.seed, 0x9707ULL), r));
    rng.shuffle(order[r]);
    // keep held-in tasks first when the collection names them
    std::stable_sort(order[r].begin(), order[r].end(),
                     [&](const std::string& a, const std::string& b) {
                       auto rank = [&](const std::string& id) {
                         for (const std::string& h : c.held_in)
                           if (h == id) return 0;
                         return 1;
                       };
                       return rank(a) < rank(b);
                     });
  }

  // slots: [run][rung][dataset][fold] for transfer and fresh
  auto grid = [&] {
    return std::vector<std::vector<std::vector<std::vector<double>>>>(
        n_runs,
        std::vector<std::vector<std::vector<double>>>(
            n_rungs, std::vector<std::vector<double>>(
                         n_out, std::vector<double>(
                                    static_cast<std::size_t>(K), NAN))));
  };
  auto tl_auc = grid();
  auto fresh_auc = grid();

  // one job per (run, rung, fold): obtain the source once, then fine-tune
  // and baseline every held-out dataset
  const std::size_t jobs = n_runs * n_rungs * static_cast<std::size_t>(K);
  parallel_for(jobs, threads, [&](std::size_t job) {
    const std::size_t r = job / (n_rungs * K);
    const std::size_t g = (job / K) % n_rungs;
    const int fold = static_cast<int>(job % K);

    net::MultitaskNetwork source;
    if (sources) {
      source = sources(r, rungs[g], fold);
    } else {
      std::vector<std::string> ids(order[r].begin(),
                                   order[r].begin() + rungs[g]);
      net::NetworkConfig cfg = spec.net;
      cfg.input_dim = c.nbits;
      cfg.n_tasks = ids.size();
      cfg.seed = hash_combine(hash_combine(hash_combine(spec.seed, r),
                                           0x317EULL + g),
                              static_cast<std::size_t>(fold));
      net::TrainSet ts = net::build_train_set(c, ids, &folds, fold);
      cfg.n_steps =
          spec.source_steps.steps_for(ts.examples.size(), cfg.batch_size);
      source = net::init(cfg);
      net::train(source, ts);
    }
    if (source.config.hidden_sizes != spec.net.hidden_sizes ||
        source.config.input_dim != c.nbits)
      throw DataError("transfer source architecture mismatch");

    for (std::size_t d = 0; d < n_out; ++d) {
      const std::vector<std::string> ids{held_out[d]};
      net::TrainSet ts = net::build_train_set(c, ids, &folds, fold);

      net::NetworkConfig cfg = spec.net;
      cfg.input_dim = c.nbits;
      cfg.n_tasks = 1;
      cfg.n_steps =
          spec.fine_tune_steps.steps_for(ts.examples.size(), cfg.batch_size);

      // fine-tuned transplant and fresh baseline share everything but the
      // initial hidden weights
      net::NetworkConfig tl_cfg = cfg;
      tl_cfg.seed = hash_combine(
          hash_combine(hash_combine(spec.seed, hash_string(held_out[d])),
                       0x7EA0ULL + r * 64 + g),
          static_cast<std::size_t>(fold));
      net::MultitaskNetwork tl_net = net::transplant(source, tl_cfg);
      net::train(tl_net, ts);

      net::NetworkConfig fresh_cfg = cfg;
      fresh_cfg.seed = hash_combine(
          hash_combine(hash_combine(spec.seed, hash_string(held_out[d])),
                       0xF4E54ULL + r * 64 + g),
          static_cast<std::size_t>(fold));
      net::MultitaskNetwork fresh_net = net::init(fresh_cfg);
      net::train(fresh_net, ts);

      metrics::EvalReport tmp;
      score_dataset_folds(c, held_out[d], 0, folds.at(held_out[d]), tl_net,
                          fold, false, tmp);
      for (const metrics::EvalRow& row : tmp.rows)
        if (row.metric == "auc") tl_auc[r][g][d][fold] = row.value;
      metrics::EvalReport tmp2;
      score_dataset_folds(c, held_out[d], 0, folds.at(held_out[d]), fresh_net,
                          fold, false, tmp2);
      for (const metrics::EvalRow& row : tmp2.rows)
        if (row.metric == "auc") fresh_auc[r][g][d][fold] = row.value;
    }
  });

  StudyResult result;
  result.study = "transfer";
  result.seed = spec.seed;
  result.spec_json = spec.to_json();

  for (std::size_t g = 0; g < n_rungs; ++g) {
    const long long rung = static_cast<long long>(rungs[g]);
    std::vector<double> rung_deltas;
    for (std::size_t r = 0; r < n_runs; ++r) {
      std::vector<double> deltas;
      for (std::size_t d = 0; d < n_out; ++d) {
        const double a_tl = mean_ignoring_nan(tl_auc[r][g][d]);
        const double a_fresh = mean_ignoring_nan(fresh_auc[r][g][d]);
        if (std::isnan(a_tl) || std::isnan(a_fresh)) continue;
        result.add(r, rung, -1, held_out[d], -1, "auc_transfer", a_tl);
        result.add(r, rung, -1, held_out[d], -1, "auc_single", a_fresh);
        result.add(r, rung, -1, held_out[d], -1, "delta_auc", a_tl - a_fresh);
        result.add(r, rung, -1, held_out[d], -1, "delta_log_odds",
                   metrics::delta_log_odds_auc(a_tl, a_fresh));
        deltas.push_back(a_tl - a_fresh);
      }
      const double mean_delta = mean_ignoring_nan(deltas);
      result.add(r, rung, -1, "", -1, "mean_delta_auc", mean_delta);
      rung_deltas.push_back(mean_delta);
    }
    char key[64];
    std::snprintf(key, sizeof(key), "rung_%zu_mean_delta_auc", rungs[g]);
    result.summary[key] = mean_ignoring_nan(rung_deltas);
  }

  // per held-out dataset cross-run means at the top rung
  for (std::size_t d = 0; d < n_out; ++d) {
    std::vector<double> deltas;
    for (std::size_t r = 0; r < n_runs; ++r) {
      const double a_tl = mean_ignoring_nan(tl_auc[r][n_rungs - 1][d]);
      const double a_fresh = mean_ignoring_nan(fresh_auc[r][n_rungs - 1][d]);
      if (!std::isnan(a_tl) && !std::isnan(a_fresh))
        deltas.push_back(a_tl - a_fresh);
    }
    result.summary["dataset_" + held_out[d] + "_mean_delta_auc"] =
        mean_ignoring_nan(deltas);
  }
  return result;
}

}  // namespace vscreen::experiments
