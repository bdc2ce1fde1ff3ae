// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fail. Training-based criteria use pinned desk-scale configurations; every
// tolerance is written out literally next to its check.
//
// Run all criteria: ./acceptance
// Run a subset:     ./acceptance 2 10 11

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vscreen/core/hash.hpp"
#include "vscreen/core/parallel.hpp"
#include "vscreen/core/rng.hpp"
#include "vscreen/data/analysis.hpp"
#include "vscreen/data/folds.hpp"
#include "vscreen/data/synth.hpp"
#include "vscreen/experiments/analysis.hpp"
#include "vscreen/experiments/growth.hpp"
#include "vscreen/experiments/protocol.hpp"
#include "vscreen/experiments/transfer.hpp"
#include "vscreen/metrics/ranking.hpp"
#include "vscreen/net/train.hpp"
#include "vscreen/stats/special.hpp"
#include "vscreen/stats/tests.hpp"

using namespace vscreen;

namespace {

unsigned g_threads = 2;
int g_pass = 0, g_fail = 0;

void report(int criterion, const char* name, bool ok, const std::string& detail) {
  std::printf("%s criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion,
              name, detail.c_str());
  std::fflush(stdout);
  if (ok) ++g_pass;
  else ++g_fail;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) /
                   static_cast<double>(v.size()));
}

// ---- pinned desk-scale study configuration ----

net::NetworkConfig desk_net() {
  net::NetworkConfig cfg;
  cfg.hidden_sizes = {128, 16};  // pyramidal: wide then narrow
  cfg.dropout_rate = 0.25;
  cfg.learning_rate = 0.05;
  cfg.batch_size = 128;
  cfg.init_std = 0.1;  // desk-scale init; 0.01 needs far longer schedules
  return cfg;
}

experiments::StepPolicy desk_steps() {
  experiments::StepPolicy p;
  p.epochs = 10.0;
  p.floor_steps = 500;
  p.cap = 20000;
  return p;
}

data::SynthSpec benchmark_synth() {
  data::SynthSpec spec;
  spec.n_tasks = 20;
  spec.n_compounds = 5000;
  spec.active_rate = 0.02;
  spec.shared_motif_count = 8;
  spec.nbits = 256;
  spec.flip_rate = 0.02;  // label noise keeps single-task nets off the ceiling
  spec.seed = 1;
  return spec;
}

// per-dataset K-fold-average AUC pairs for one protocol seed
struct PairedAuc {
  std::vector<std::string> datasets;
  std::vector<double> mt;
  std::vector<double> st;
};

PairedAuc paired_eval(const data::Collection& c, std::uint64_t seed) {
  experiments::EvalProtocol protocol;
  protocol.folds = 5;
  protocol.fold_seed = hash_combine(0xACCE97ULL, seed);
  protocol.threads = g_threads;
  net::NetworkConfig cfg = desk_net();
  cfg.seed = seed;
  const auto ids = c.dataset_ids();
  const auto mt = experiments::evaluate_multitask(c, ids, cfg, desk_steps(),
                                                  protocol, "pmtnn");
  const auto st = experiments::evaluate_singletask(c, ids, cfg, desk_steps(),
                                                   protocol, "pstnn");
  const auto mt_auc = metrics::dataset_kfold_auc(mt);
  const auto st_auc = metrics::dataset_kfold_auc(st);
  PairedAuc out;
  for (const std::string& id : ids) {
    out.datasets.push_back(id);
    out.mt.push_back(mt_auc.at(id));
    out.st.push_back(st_auc.at(id));
  }
  return out;
}

// multitask-effect evaluations are shared between criteria 6 and 9
std::vector<PairedAuc> g_effect_runs;
data::Collection g_effect_collection;
bool g_effect_ready = false;

void ensure_effect_runs() {
  if (g_effect_ready) return;
  g_effect_collection = data::synth_collection(benchmark_synth());
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    g_effect_runs.push_back(paired_eval(g_effect_collection, seed));
  g_effect_ready = true;
}

// ---- criteria ----

void criterion_1_gradient_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(0xC1);
  std::size_t nets = 0, coords = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 24; ++trial) {
    net::NetworkConfig cfg;
    cfg.input_dim = 8 + rng.uniform_index(25);          // <= 32
    cfg.hidden_sizes = {4 + rng.uniform_index(13),      // <= 16
                        2 + rng.uniform_index(7)};      // <= 8
    cfg.n_tasks = 1 + rng.uniform_index(3);
    cfg.init_std = 0.05;
    cfg.seed = rng.next_u64();
    net::MultitaskNetwork model = net::init(cfg);

    std::vector<std::vector<std::uint32_t>> storage;
    net::Minibatch batch;
    for (int e = 0; e < 8; ++e) {
      std::vector<std::uint32_t> bits;
      for (std::uint32_t b = 0; b < cfg.input_dim; ++b)
        if (rng.bernoulli(0.3)) bits.push_back(b);
      if (bits.empty()) bits.push_back(0);
      storage.push_back(std::move(bits));
      batch.task_ids.push_back(rng.uniform_index(cfg.n_tasks));
      batch.labels.push_back(rng.bernoulli(0.5) ? 1 : 0);
      batch.weights.push_back(0.5 + rng.uniform());
    }
    for (auto& bits : storage)
      batch.inputs.emplace_back(bits.data(), bits.size());

    net::Gradients g = net::loss_and_gradient(model, batch);
    std::vector<double*> params;
    std::vector<double> grads;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      for (std::size_t i = 0; i < model.layers[l].w.size(); ++i) {
        params.push_back(&model.layers[l].w.data()[i]);
        grads.push_back(g.layers[l].w.data()[i]);
      }
      for (std::size_t i = 0; i < model.layers[l].b.size(); ++i) {
        params.push_back(&model.layers[l].b[i]);
        grads.push_back(g.layers[l].b[i]);
      }
    }
    for (std::size_t h = 0; h < model.heads.size(); ++h)
      for (std::size_t i = 0; i < model.heads[h].size(); ++i) {
        params.push_back(&model.heads[h].data()[i]);
        grads.push_back(g.heads[h].data()[i]);
      }

    const double eps = 1e-4;
    for (int probe = 0; probe < 50; ++probe) {
      const std::size_t i = rng.uniform_index(params.size());
      const double saved = *params[i];
      *params[i] = saved + eps;
      const double up = net::loss_and_gradient(model, batch).loss;
      *params[i] = saved - eps;
      const double down = net::loss_and_gradient(model, batch).loss;
      *params[i] = saved;
      const double fd = (up - down) / (2.0 * eps);
      const double scale = std::max({1e-8, std::fabs(fd), std::fabs(grads[i])});
      worst = std::max(worst, std::fabs(fd - grads[i]) / scale);
      ++coords;
    }
    ++nets;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%zu nets, %zu coordinates, worst relative error %.2e, %.1fs",
                nets, coords, worst, secs);
  report(1, "gradient matches central finite differences within 1e-5",
         worst < 1e-5 && nets >= 20 && secs < 60.0, buf);
}

void criterion_2_auc_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(0xC2);
  double worst = 0.0;
  std::size_t trials = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(199);
    metrics::ScoredSet s;
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      s.scores.push_back(rng.bernoulli(0.5)
                             ? static_cast<double>(rng.uniform_index(8)) / 7.0
                             : rng.uniform());
      s.labels.push_back(rng.bernoulli(0.3) ? 1 : 0);
      pos |= s.labels.back() == 1;
      neg |= s.labels.back() == 0;
    }
    if (!pos) s.labels[0] = 1;
    if (!neg) s.labels[n - 1] = 0;
    const double expect = oracle::auc_pairwise(s.scores, s.labels);
    worst = std::max(worst, std::fabs(metrics::roc_auc(s) - expect));
    ++trials;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%zu sets, worst |diff| %.2e, %.1fs", trials,
                worst, secs);
  report(2, "roc_auc equals the pairwise half-credit oracle to 1e-12",
         worst <= 1e-12 && secs < 60.0, buf);
}

void criterion_3_enrichment() {
  // perfect classifier: exactly 1/fpr at every grid point
  metrics::ScoredSet perfect;
  for (int i = 0; i < 400; ++i) {
    perfect.scores.push_back(i < 40 ? 10.0 + i : -static_cast<double>(i));
    perfect.labels.push_back(i < 40 ? 1 : 0);
  }
  bool exact = true;
  for (double fpr : metrics::kEnrichmentFprGrid)
    exact &= metrics::roc_enrichment(perfect, fpr) == 1.0 / fpr;

  // random scores: mean over 1e4 trials within 0.2 of 1
  Rng rng(0xC3);
  double total = 0.0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    metrics::ScoredSet s;
    for (int i = 0; i < 150; ++i) {
      s.scores.push_back(rng.uniform());
      s.labels.push_back(i < 15 ? 1 : 0);
    }
    total += metrics::roc_enrichment(s, 0.05);
  }
  const double mc = total / trials;
  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "perfect grid exact=%s, random mean %.3f (want 1 +- 0.2)",
                exact ? "yes" : "no", mc);
  report(3, "enrichment sanity on perfect and random classifiers",
         exact && std::fabs(mc - 1.0) <= 0.2, buf);
}

void criterion_4_stratification() {
  Rng rng(0xC4);
  std::size_t checked = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n_active = 1 + rng.uniform_index(120);
    const std::size_t n_inactive = 10 + rng.uniform_index(800);
    const int k = 2 + static_cast<int>(rng.uniform_index(9));
    if (n_active + n_inactive < static_cast<std::size_t>(k)) continue;

    data::Dataset d;
    d.id = "strat";
    for (std::size_t i = 0; i < n_active + n_inactive; ++i) {
      data::Record r;
      r.compound_id = "c" + std::to_string(i);
      r.fingerprint = chem::Fingerprint(8);
      r.label = i < n_active ? 1 : 0;
      d.records.push_back(std::move(r));
    }
    const auto fa = data::stratified_kfold(d, k, rng.next_u64());
    std::vector<double> fold_active(static_cast<std::size_t>(k), 0.0);
    for (std::size_t i = 0; i < d.records.size(); ++i)
      if (d.records[i].label != 0) fold_active[fa.fold_of[i]] += 1.0;
    const double expect = static_cast<double>(n_active) / k;
    for (double cnt : fold_active)
      worst = std::max(worst, std::fabs(cnt - expect));
    ++checked;
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%zu triples, worst fold deviation %.4f",
                checked, worst);
  report(4, "every fold's active count within 1 of n_active/K",
         worst < 1.0 && checked >= 450, buf);
}

void criterion_5_replica_equivalence() {
  data::SynthSpec spec;
  spec.n_tasks = 3;
  spec.n_compounds = 900;
  spec.active_rate = 0.1;
  spec.shared_motif_count = 2;
  spec.nbits = 64;
  spec.motif_bits = 3;
  spec.held_in_count = 3;
  spec.seed = 5;
  data::Collection c = data::synth_collection(spec);

  net::NetworkConfig cfg;
  cfg.input_dim = c.nbits;
  cfg.hidden_sizes = {16, 8};
  cfg.n_tasks = 3;
  cfg.batch_size = 64;
  cfg.n_steps = 100;
  cfg.learning_rate = 0.05;
  cfg.dropout_rate = 0.25;
  cfg.seed = 99;

  net::TrainSet ts = net::build_train_set(c, c.dataset_ids());
  cfg.n_workers = 1;
  net::MultitaskNetwork single = net::init(cfg);
  net::train(single, ts);
  cfg.n_workers = 4;
  net::MultitaskNetwork quad = net::init(cfg);
  net::train(quad, ts);

  auto flat = [](const net::MultitaskNetwork& n) {
    std::vector<double> out;
    for (const auto& l : n.layers) {
      out.insert(out.end(), l.w.data().begin(), l.w.data().end());
      out.insert(out.end(), l.b.begin(), l.b.end());
    }
    for (const auto& h : n.heads)
      out.insert(out.end(), h.data().begin(), h.data().end());
    return out;
  };
  const auto a = flat(single), b = flat(quad);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst,
                     std::fabs(a[i] - b[i]) / std::max(1e-12, std::fabs(a[i])));
  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "worst relative parameter difference %.2e after 100 steps", worst);
  report(5, "4-worker synchronous training matches single worker to 1e-8",
         worst < 1e-8, buf);
}

void criterion_6_multitask_effect() {
  const auto t0 = std::chrono::steady_clock::now();
  ensure_effect_runs();
  // pooled (task, seed) sign test: "a" is the single-task column, so the
  // Wilson interval bounds the fraction where single-task is superior
  stats::PairedSample pooled;
  std::vector<double> deltas;
  for (const PairedAuc& run : g_effect_runs)
    for (std::size_t i = 0; i < run.datasets.size(); ++i) {
      pooled.a.push_back(run.st[i]);
      pooled.b.push_back(run.mt[i]);
      deltas.push_back(run.mt[i] - run.st[i]);
    }
  const auto sign = stats::sign_test_wilson(pooled);
  const double mean_delta = mean_of(deltas);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "mean delta AUC %+.4f over %zu (task,seed) pairs; single-task-"
                "superior CI [%.3f, %.3f]; %.0fs",
                mean_delta, deltas.size(), sign.ci.lo, sign.ci.hi, secs);
  report(6, "multitask beats seed-paired single-task (Wilson CI below 0.5)",
         mean_delta > 0.0 && sign.ci.hi < 0.5 && secs < 1800.0, buf);
}

void criterion_7_growth_direction() {
  // a small held-in set against a large pool of addable tasks, with scarce
  // per-task actives, so most of the shared-motif evidence arrives through
  // the growth rungs
  data::SynthSpec sspec;
  sspec.n_tasks = 16;
  sspec.n_compounds = 1500;
  sspec.active_rate = 0.02;
  sspec.shared_motif_count = 6;
  sspec.nbits = 256;
  sspec.flip_rate = 0.015;
  sspec.held_in_count = 4;
  sspec.seed = 2;
  data::Collection c = data::synth_collection(sspec);
  // held-in tasks are an analyst input; use ones wired to shared motifs so
  // the added tasks have evidence to contribute (the unwired grade-0 task
  // only ever gets diluted, the "initial dip" shape)
  c.held_in = {"synth-004", "synth-008", "synth-012", "synth-015"};

  experiments::GrowthCurveSpec spec;
  spec.ladder = {4, 10, 16};
  spec.n_runs = 8;
  spec.net = desk_net();
  // top layer must hold every task's private feature plus the shared ones
  // (16 + 6 here); a 16-unit bottleneck starves held-in tasks as rungs grow
  spec.net.hidden_sizes = {128, 40};
  spec.steps.epochs = 25.0;  // small pools need more passes to converge
  spec.steps.floor_steps = 1000;
  spec.steps.cap = 20000;
  spec.protocol.folds = 3;
  spec.seed = 11;
  experiments::StudyResult r = experiments::run_growth_curve(spec, c, g_threads);

  const double first = r.summary.at("first_rung_mean_delta_auc");
  const double final_delta = r.summary.at("final_rung_mean_delta_auc");
  const double slope_lo = r.summary.at("slope_ci_lo");
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "mean delta first rung %+.4f, final rung %+.4f, slope 95%% CI "
                "lower %+.5f",
                first, final_delta, slope_lo);
  report(7, "growth curve rises by >0.01 AUC with positive rung slope",
         final_delta - first > 0.01 && slope_lo > 0.0, buf);
}

void criterion_8_transfer_direction() {
  data::SynthSpec sspec;
  sspec.n_tasks = 12;
  sspec.n_compounds = 3000;
  sspec.active_rate = 0.02;
  sspec.shared_motif_count = 6;
  sspec.nbits = 256;
  sspec.flip_rate = 0.02;
  sspec.held_in_count = 6;
  sspec.n_holdout_shared = 2;
  sspec.n_holdout_disjoint = 2;
  sspec.seed = 3;
  data::Collection c = data::synth_collection(sspec);

  experiments::TransferSpec spec;
  spec.rungs = {12};
  spec.n_runs = 10;
  spec.net = desk_net();
  spec.source_steps = desk_steps();
  spec.fine_tune_steps = desk_steps();
  spec.protocol.folds = 3;
  spec.seed = 21;
  experiments::StudyResult r = experiments::run_transfer(spec, c, nullptr, g_threads);

  // split the per-(run,dataset) deltas into shared and disjoint held-outs
  std::vector<double> shared, disjoint;
  const std::set<std::string> shared_ids{c.held_out.begin(),
                                         c.held_out.begin() + 2};
  for (const auto& row : r.rows) {
    if (row.metric != "delta_auc") continue;
    if (shared_ids.count(row.dataset)) shared.push_back(row.value);
    else disjoint.push_back(row.value);
  }
  const double mean_shared = mean_of(shared);
  const double mean_disjoint = mean_of(disjoint);
  const double noise = 2.0 * se_of(disjoint);
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "motif-sharing mean delta %+.4f (n=%zu); motif-disjoint "
                "%+.4f with noise band %.4f",
                mean_shared, shared.size(), mean_disjoint, noise);
  report(8, "transfer helps motif-sharing tasks and not disjoint ones",
         mean_shared > 0.0 && mean_disjoint <= noise, buf);
}

void criterion_9_aor_correlation() {
  ensure_effect_runs();
  // average each task's K-fold-average AUC over the seeds, then join with
  // the collection's AOR values through the analysis op
  const auto ids = g_effect_collection.dataset_ids();
  metrics::EvalReport mt, st;
  mt.model = "pmtnn";
  st.model = "pstnn";
  mt.folds = st.folds = 1;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<double> mt_vals, st_vals;
    for (const PairedAuc& run : g_effect_runs) {
      mt_vals.push_back(run.mt[i]);
      st_vals.push_back(run.st[i]);
    }
    mt.add(ids[i], "SYNTH", 0, "auc", mean_of(mt_vals));
    st.add(ids[i], "SYNTH", 0, "auc", mean_of(st_vals));
  }
  const auto graded =
      experiments::run_aor_analysis(mt, st, g_effect_collection);

  // sharing disabled: same pipeline on a motif-disjoint collection
  data::SynthSpec off = benchmark_synth();
  off.n_tasks = 10;
  off.n_compounds = 3000;
  off.shared_motif_count = 0;
  off.seed = 4;
  data::Collection c_off = data::synth_collection(off);
  const auto off_ids = c_off.dataset_ids();
  metrics::EvalReport mt_off, st_off;
  mt_off.model = "pmtnn";
  st_off.model = "pstnn";
  mt_off.folds = st_off.folds = 1;
  std::vector<std::vector<double>> mt_vals(off_ids.size()),
      st_vals(off_ids.size());
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    experiments::EvalProtocol protocol;
    protocol.folds = 3;
    protocol.fold_seed = hash_combine(0x0FFULL, seed);
    protocol.threads = g_threads;
    net::NetworkConfig cfg = desk_net();
    cfg.seed = seed;
    const auto mt_run = experiments::evaluate_multitask(
        c_off, off_ids, cfg, desk_steps(), protocol, "pmtnn");
    const auto st_run = experiments::evaluate_singletask(
        c_off, off_ids, cfg, desk_steps(), protocol, "pstnn");
    const auto mt_auc = metrics::dataset_kfold_auc(mt_run);
    const auto st_auc = metrics::dataset_kfold_auc(st_run);
    for (std::size_t i = 0; i < off_ids.size(); ++i) {
      mt_vals[i].push_back(mt_auc.at(off_ids[i]));
      st_vals[i].push_back(st_auc.at(off_ids[i]));
    }
  }
  for (std::size_t i = 0; i < off_ids.size(); ++i) {
    mt_off.add(off_ids[i], "SYNTH", 0, "auc", mean_of(mt_vals[i]));
    st_off.add(off_ids[i], "SYNTH", 0, "auc", mean_of(st_vals[i]));
  }
  const auto flat = experiments::run_aor_analysis(mt_off, st_off, c_off);

  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "graded sharing r^2 %.3f (want > 0.3); sharing disabled r^2 "
                "%.3f (want < 0.1)",
                graded.r2, flat.r2);
  report(9, "AOR explains multitask gains only under shared actives",
         graded.r2 > 0.3 && flat.r2 < 0.1, buf);
}

void criterion_10_stats_fixtures() {
  // Wilson vs numeric score-test inversion
  double worst_wilson = 0.0;
  std::size_t n_wilson = 0;
  for (int n : {1, 2, 3, 5, 7, 10, 16, 25, 40, 80, 200}) {
    for (int wins = 0; wins <= n; wins += std::max(1, n / 6)) {
      const auto ci = stats::wilson_interval(wins, n, 1.96);
      const auto [lo, hi] = oracle::wilson_by_inversion(wins, n, 1.96);
      worst_wilson = std::max(worst_wilson, std::fabs(ci.lo - lo));
      worst_wilson = std::max(worst_wilson, std::fabs(ci.hi - hi));
      ++n_wilson;
    }
  }

  // paired and Welch t-tests vs quadrature of the t density
  Rng rng(0xC10);
  double worst_t = 0.0;
  std::size_t n_t = 0;
  for (int trial = 0; trial < 60; ++trial) {
    stats::PairedSample p;
    const std::size_t n = 4 + rng.uniform_index(30);
    for (std::size_t i = 0; i < n; ++i) {
      p.a.push_back(rng.gaussian() + 0.3);
      p.b.push_back(0.8 * rng.gaussian());
    }
    const auto two = stats::paired_t_test(p, 2);
    const double expect2 =
        2.0 * (1.0 - oracle::t_cdf_quadrature(std::fabs(two.t), two.df));
    worst_t = std::max(worst_t, std::fabs(two.p - expect2));

    std::vector<double> x, y;
    const std::size_t nx = 5 + rng.uniform_index(25);
    const std::size_t ny = 5 + rng.uniform_index(25);
    for (std::size_t i = 0; i < nx; ++i) x.push_back(rng.gaussian() + 0.5);
    for (std::size_t i = 0; i < ny; ++i) y.push_back(1.7 * rng.gaussian());
    const auto welch = stats::welch_t_test(x, y, 1);
    const double expect1 = 1.0 - oracle::t_cdf_quadrature(welch.t, welch.df);
    worst_t = std::max(worst_t, std::fabs(welch.p - expect1));
    n_t += 2;
  }

  // notch intervals vs direct quantile arithmetic
  double worst_notch = 0.0;
  std::size_t n_notch = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(60);
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(rng.gaussian() * 4.0);
    const auto notch = stats::notch_interval(v);
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    auto q = [&](double p) {
      const double h = (s.size() - 1) * p;
      const std::size_t lo = static_cast<std::size_t>(h);
      const std::size_t hi = std::min(lo + 1, s.size() - 1);
      return s[lo] + (h - lo) * (s[hi] - s[lo]);
    };
    const double half = 1.57 * (q(0.75) - q(0.25)) / std::sqrt(double(n));
    worst_notch =
        std::max(worst_notch, std::fabs((notch.hi - notch.lo) / 2.0 - half));
    worst_notch = std::max(worst_notch, std::fabs(notch.median - q(0.5)));
    ++n_notch;
  }

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "wilson %zu fixtures worst %.2e; t-tests %zu worst %.2e; "
                "notch %zu worst %.2e",
                n_wilson, worst_wilson, n_t, worst_t, n_notch, worst_notch);
  report(10, "statistics match independent oracles to 1e-6",
         n_wilson >= 50 && n_t >= 50 && n_notch >= 50 && worst_wilson < 1e-6 &&
             worst_t < 1e-6 && worst_notch < 1e-6,
         buf);
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(VSCREEN_BIN) + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

bool same_bytes(const std::string& a, const std::string& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

void criterion_11_cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "vscreen_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string d = dir.string();

  bool ok = true;

  // synth twice: byte-identical collections
  ok &= run_cli("synth --out " + d + "/c1.json --tasks 5 --compounds 400 "
                "--active-rate 0.05 --shared-motifs 2 --nbits 128 --seed 42") == 0;
  ok &= run_cli("synth --out " + d + "/c2.json --tasks 5 --compounds 400 "
                "--active-rate 0.05 --shared-motifs 2 --nbits 128 --seed 42") == 0;
  const bool synth_same = same_bytes(d + "/c1.json", d + "/c2.json");
  ok &= synth_same;

  // evaluate twice at --threads 1: byte-identical reports
  const std::string eval_flags =
      " --collection " + d + "/c1.json --folds 3 --epochs 2 --floor-steps 100 "
      "--seed 7 --model-name m";
  ok &= run_cli("evaluate" + eval_flags + " --threads 1 --out " + d + "/e1") == 0;
  ok &= run_cli("evaluate" + eval_flags + " --threads 1 --out " + d + "/e2") == 0;
  const bool eval_same = same_bytes(d + "/e1/report.json", d + "/e2/report.json");
  ok &= eval_same;

  // higher thread count: summaries match the single-thread reference
  ok &= run_cli("evaluate" + eval_flags + " --threads 2 --out " + d + "/e4") == 0;
  const bool threads_same =
      same_bytes(d + "/e1/report.json", d + "/e4/report.json");
  ok &= threads_same;

  // split determinism
  ok &= run_cli("split --collection " + d + "/c1.json --folds 4 --seed 5 --out " +
                d + "/f1.csv") == 0;
  ok &= run_cli("split --collection " + d + "/c1.json --folds 4 --seed 5 --out " +
                d + "/f2.csv") == 0;
  const bool split_same = same_bytes(d + "/f1.csv", d + "/f2.csv");
  ok &= split_same;

  const std::string detail =
      std::string("synth ") + (synth_same ? "identical" : "DIFFER") +
      ", evaluate " + (eval_same ? "identical" : "DIFFER") +
      ", threads=2 report " + (threads_same ? "identical" : "DIFFER") +
      ", split " + (split_same ? "identical" : "DIFFER");
  report(11, "CLI outputs are byte-identical across reruns and thread counts",
         ok, detail);
  fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("VSCREEN_THREADS"))
    g_threads = static_cast<unsigned>(std::max(1, std::atoi(env)));
  else
    g_threads = std::max(1u, default_threads());

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  auto want = [&](int n) { return selected.empty() || selected.count(n); };

  if (want(1)) criterion_1_gradient_oracle();
  if (want(2)) criterion_2_auc_oracle();
  if (want(3)) criterion_3_enrichment();
  if (want(4)) criterion_4_stratification();
  if (want(5)) criterion_5_replica_equivalence();
  if (want(6)) criterion_6_multitask_effect();
  if (want(7)) criterion_7_growth_direction();
  if (want(8)) criterion_8_transfer_direction();
  if (want(9)) criterion_9_aor_correlation();
  if (want(10)) criterion_10_stats_fixtures();
  if (want(11)) criterion_11_cli_determinism();

  std::printf("acceptance: %d passed, %d failed\n", g_pass, g_fail);
  return g_fail == 0 ? 0 : 1;
}
