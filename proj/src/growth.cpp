#include "vscreen/experiments/growth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "json.hpp"
#include "vscreen/core/hash.hpp"
#include "vscreen/core/parallel.hpp"
#include "vscreen/core/rng.hpp"
#include "vscreen/metrics/ranking.hpp"
#include "vscreen/net/checkpoint.hpp"
#include "vscreen/stats/special.hpp"

namespace vscreen::experiments {

using nlohmann::json;

net::NetworkConfig desk_study_net() {
  net::NetworkConfig cfg;
  cfg.hidden_sizes = {128, 16};
  cfg.dropout_rate = 0.25;
  cfg.learning_rate = 0.05;
  cfg.batch_size = 128;
  return cfg;
}

std::string GrowthCurveSpec::to_json() const {
  json doc = {{"study", "growth_curve"},
              {"ladder", ladder},
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

GrowthCurveSpec GrowthCurveSpec::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad growth spec: ") + e.what());
  }
  GrowthCurveSpec spec;
  spec.net = desk_study_net();
  if (doc.contains("ladder"))
    spec.ladder = doc["ladder"].get<std::vector<std::size_t>>();
  spec.n_runs = doc.value("n_runs", spec.n_runs);
  if (doc.contains("net")) spec.net = net::NetworkConfig::from_json(doc["net"].dump());
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

std::string growth_checkpoint_name(std::size_t run, std::size_t rung,
                                   int fold) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "growth_run%03zu_rung%04zu_fold%d.ckpt", run,
                rung, fold);
  return buf;
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
  if (n == 0) return NAN;
  return sum / static_cast<double>(n);
}

// OLS slope of y over x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

StudyResult run_growth_curve(const GrowthCurveSpec& spec,
                             const data::Collection& c, unsigned threads) {
  if (c.held_in.empty())
    throw DataError("growth curve requires a held_in set in the collection");
  const std::vector<std::string>& held_in = c.held_in;

  // tasks that can be added: everything not held in or held out
  std::vector<std::string> pool;
  for (const data::Dataset& d : c.datasets) {
    bool reserved = false;
    for (const std::string& id : held_in) reserved |= id == d.id;
    for (const std::string& id : c.held_out) reserved |= id == d.id;
    if (!reserved) pool.push_back(d.id);
  }

  std::vector<std::size_t> ladder = spec.ladder;
  if (ladder.empty()) {
    std::size_t n = held_in.size();
    const std::size_t total = held_in.size() + pool.size();
    while (n < total) {
      ladder.push_back(n);
      n *= 2;
    }
    ladder.push_back(total);
  }
  if (ladder.front() != held_in.size())
    throw DataError("growth ladder must start at the held-in count");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i] <= ladder[i - 1])
      throw DataError("growth ladder must be strictly increasing");
  if (ladder.back() > held_in.size() + pool.size())
    throw DataError("growth ladder exceeds available tasks");

  const int K = spec.protocol.folds;
  const auto folds = data::assign_folds(c, K, spec.protocol.fold_seed);
  const std::size_t n_runs = spec.n_runs;
  const std::size_t n_rungs = ladder.size();
  const std::size_t n_held = held_in.size();

  // task orders per run
  std::vector<std::vector<std::string>> order(n_runs, pool);
  for (std::size_t r = 0; r < n_runs; ++r) {
    Rng rng(hash_combine(hash_combine(spec.seed, 0x9707ULL), r));
    rng.shuffle(order[r]);
  }

  // result slots: [run][rung][dataset][fold] and [run][dataset][fold]
  auto nan_grid = [&](std::size_t a, std::size_t b) {
    return std::vector<std::vector<double>>(
        a, std::vector<double>(b, NAN));
  };
  std::vector<std::vector<std::vector<std::vector<double>>>> mt_auc(
      n_runs, std::vector<std::vector<std::vector<double>>>(
                  n_rungs, nan_grid(n_held, static_cast<std::size_t>(K))));
  std::vector<std::vector<std::vector<double>>> st_auc(
      n_runs, nan_grid(n_held, static_cast<std::size_t>(K)));

  if (!spec.checkpoint_dir.empty())
    std::filesystem::create_directories(spec.checkpoint_dir);

  // one job per multitask (run, rung, fold) plus one per single-task
  // (run, dataset, fold); everything is independently seeded
  const std::size_t mt_jobs = n_runs * n_rungs * static_cast<std::size_t>(K);
  const std::size_t st_jobs = n_runs * n_held * static_cast<std::size_t>(K);
  parallel_for(mt_jobs + st_jobs, threads, [&](std::size_t job) {
    if (job < mt_jobs) {
      const std::size_t r = job / (n_rungs * K);
      const std::size_t rung = (job / K) % n_rungs;
      const int fold = static_cast<int>(job % K);

      std::vector<std::string> ids = held_in;
      for (std::size_t i = 0; i < ladder[rung] - n_held; ++i)
        ids.push_back(order[r][i]);

      net::NetworkConfig cfg = spec.net;
      cfg.input_dim = c.nbits;
      cfg.n_tasks = ids.size();
      cfg.seed = hash_combine(hash_combine(hash_combine(spec.seed, r),
                                           0x317EULL + rung),
                              static_cast<std::size_t>(fold));
      net::TrainSet ts = net::build_train_set(c, ids, &folds, fold);
      cfg.n_steps = spec.steps.steps_for(ts.examples.size(), cfg.batch_size);
      net::MultitaskNetwork model = net::init(cfg);
      net::train(model, ts);

      for (std::size_t d = 0; d < n_held; ++d) {
        metrics::EvalReport tmp;
        score_dataset_folds(c, held_in[d], d, folds.at(held_in[d]), model,
                            fold, false, tmp);
        for (const metrics::EvalRow& row : tmp.rows)
          if (row.metric == "auc") mt_auc[r][rung][d][fold] = row.value;
      }
      if (!spec.checkpoint_dir.empty())
        net::save_checkpoint(
            model, spec.checkpoint_dir + "/" +
                       growth_checkpoint_name(r, ladder[rung], fold));
    } else {
      const std::size_t j = job - mt_jobs;
      const std::size_t r = j / (n_held * K);
      const std::size_t d = (j / K) % n_held;
      const int fold = static_cast<int>(j % K);

      net::NetworkConfig cfg = spec.net;
      cfg.input_dim = c.nbits;
      cfg.n_tasks = 1;
      cfg.seed = hash_combine(hash_combine(hash_combine(spec.seed, r),
                                           hash_string(held_in[d])),
                              0x57AULL + static_cast<std::size_t>(fold));
      const std::vector<std::string> ids{held_in[d]};
      net::TrainSet ts = net::build_train_set(c, ids, &folds, fold);
      cfg.n_steps = spec.steps.steps_for(ts.examples.size(), cfg.batch_size);
      net::MultitaskNetwork model = net::init(cfg);
      net::train(model, ts);

      metrics::EvalReport tmp;
      score_dataset_folds(c, held_in[d], 0, folds.at(held_in[d]), model, fold,
                          false, tmp);
      for (const metrics::EvalRow& row : tmp.rows)
        if (row.metric == "auc") st_auc[r][d][fold] = row.value;
    }
  });

  StudyResult result;
  result.study = "growth_curve";
  result.seed = spec.seed;
  result.spec_json = spec.to_json();

  std::vector<std::vector<double>> run_rung_mean(n_runs,
                                                 std::vector<double>(n_rungs));
  for (std::size_t r = 0; r < n_runs; ++r) {
    for (std::size_t g = 0; g < n_rungs; ++g) {
      const long long rung = static_cast<long long>(ladder[g]);
      std::vector<double> deltas;
      for (std::size_t d = 0; d < n_held; ++d) {
        for (int k = 0; k < K; ++k) {
          if (!std::isnan(mt_auc[r][g][d][k]))
            result.add(r, rung, -1, held_in[d], k, "fold_auc_multitask",
                       mt_auc[r][g][d][k]);
          if (g == 0 && !std::isnan(st_auc[r][d][k]))
            result.add(r, -1, -1, held_in[d], k, "fold_auc_single",
                       st_auc[r][d][k]);
        }
        const double auc_mt = mean_ignoring_nan(mt_auc[r][g][d]);
        const double auc_st = mean_ignoring_nan(st_auc[r][d]);
        if (std::isnan(auc_mt) || std::isnan(auc_st)) continue;
        result.add(r, rung, -1, held_in[d], -1, "auc_multitask", auc_mt);
        result.add(r, rung, -1, held_in[d], -1, "auc_single", auc_st);
        result.add(r, rung, -1, held_in[d], -1, "delta_auc", auc_mt - auc_st);
        result.add(r, rung, -1, held_in[d], -1, "delta_log_odds",
                   metrics::delta_log_odds_auc(auc_mt, auc_st));
        deltas.push_back(auc_mt - auc_st);
      }
      const double mean_delta = mean_ignoring_nan(deltas);
      result.add(r, rung, -1, "", -1, "mean_delta_auc", mean_delta);
      run_rung_mean[r][g] = mean_delta;
    }
  }

  // cross-run means per rung and the rung-index slope with a 95% t CI
  std::vector<double> xs(n_rungs);
  for (std::size_t g = 0; g < n_rungs; ++g) {
    xs[g] = static_cast<double>(g);
    std::vector<double> col;
    for (std::size_t r = 0; r < n_runs; ++r) col.push_back(run_rung_mean[r][g]);
    char key[64];
    std::snprintf(key, sizeof(key), "rung_%zu_mean_delta_auc", ladder[g]);
    result.summary[key] = mean_ignoring_nan(col);
  }
  result.summary["first_rung_mean_delta_auc"] =
      result.summary["rung_" + std::to_string(ladder.front()) +
                     "_mean_delta_auc"];
  result.summary["final_rung_mean_delta_auc"] =
      result.summary["rung_" + std::to_string(ladder.back()) +
                     "_mean_delta_auc"];

  if (n_runs >= 2 && n_rungs >= 2) {
    std::vector<double> slopes;
    for (std::size_t r = 0; r < n_runs; ++r)
      slopes.push_back(ols_slope(xs, run_rung_mean[r]));
    double mean = 0.0;
    for (double s : slopes) mean += s;
    mean /= static_cast<double>(slopes.size());
    double var = 0.0;
    for (double s : slopes) var += (s - mean) * (s - mean);
    var /= static_cast<double>(slopes.size() - 1);
    const double se = std::sqrt(var / static_cast<double>(slopes.size()));
    const double tq = stats::student_t_quantile(
        0.975, static_cast<double>(slopes.size() - 1));
    result.summary["slope_mean"] = mean;
    result.summary["slope_ci_lo"] = mean - tq * se;
    result.summary["slope_ci_hi"] = mean + tq * se;
  }
  return result;
}

}  // namespace vscreen::experiments
