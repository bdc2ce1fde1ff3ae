#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "vscreen/core/rng.hpp"
#include "vscreen/data/synth.hpp"
#include "vscreen/metrics/ranking.hpp"
#include "vscreen/net/checkpoint.hpp"
#include "vscreen/net/train.hpp"

using namespace vscreen;
using namespace vscreen::net;

namespace {

data::Collection small_collection(std::uint64_t seed, std::size_t tasks = 2,
                                  std::size_t compounds = 400) {
  data::SynthSpec spec;
  spec.n_tasks = tasks;
  spec.n_compounds = compounds;
  spec.active_rate = 0.1;
  spec.shared_motif_count = 2;
  spec.nbits = 64;
  spec.motif_bits = 3;
  spec.held_in_count = tasks;
  spec.seed = seed;
  return data::synth_collection(spec);
}

std::vector<double> flatten(const MultitaskNetwork& net) {
  std::vector<double> out;
  for (const Layer& l : net.layers) {
    out.insert(out.end(), l.w.data().begin(), l.w.data().end());
    out.insert(out.end(), l.b.begin(), l.b.end());
  }
  for (const Matrix& h : net.heads)
    out.insert(out.end(), h.data().begin(), h.data().end());
  return out;
}

NetworkConfig tiny_config(const data::Collection& c, std::size_t tasks) {
  NetworkConfig cfg;
  cfg.input_dim = c.nbits;
  cfg.hidden_sizes = {16, 8};
  cfg.n_tasks = tasks;
  cfg.batch_size = 32;
  cfg.learning_rate = 0.05;
  cfg.n_steps = 60;
  cfg.dropout_rate = 0.0;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("active weighting: total active weight equals inactive count") {
  data::Collection c = small_collection(3);
  TrainSet ts = build_train_set(c, {c.datasets[0].id});
  double active_weight_sum = 0.0;
  std::size_t inactive = 0;
  for (const TrainExample& ex : ts.examples) {
    if (ex.label != 0) active_weight_sum += ex.weight;
    else {
      CHECK(ex.weight == 1.0);
      ++inactive;
    }
  }
  CHECK(active_weight_sum ==
        doctest::Approx(static_cast<double>(inactive)).epsilon(1e-9));

  // the worked ratio: 100 actives, 9900 inactives -> weight 99 each
  data::Dataset d;
  d.id = "w";
  d.group = data::Group::SYNTH;
  for (int i = 0; i < 10000; ++i) {
    data::Record r;
    r.compound_id = "c" + std::to_string(i);
    r.fingerprint = chem::Fingerprint(64);
    r.fingerprint.set(i % 64);
    r.label = i < 100 ? 1 : 0;
    d.records.push_back(std::move(r));
  }
  data::Collection single;
  single.nbits = 64;
  single.datasets = {d};
  TrainSet ws = build_train_set(single, {"w"});
  for (const TrainExample& ex : ws.examples)
    if (ex.label != 0) CHECK(ex.weight == doctest::Approx(99.0));
}

TEST_CASE("lr=0 leaves parameters unchanged") {
  data::Collection c = small_collection(5);
  NetworkConfig cfg = tiny_config(c, 2);
  cfg.lr_schedule = {{0, 0.0}};  // zero rate from step 0
  MultitaskNetwork net = init(cfg);
  const std::vector<double> before = flatten(net);
  TrainSet ts = build_train_set(c, c.dataset_ids());
  train(net, ts);
  CHECK(flatten(net) == before);
  CHECK(net.step == cfg.n_steps);
}

TEST_CASE("one gradient step decreases loss on a fixed batch") {
  data::Collection c = small_collection(8);
  NetworkConfig cfg = tiny_config(c, 2);
  MultitaskNetwork net = init(cfg);
  TrainSet ts = build_train_set(c, c.dataset_ids());

  Minibatch batch;
  for (std::size_t i = 0; i < 64; ++i) {
    const TrainExample& ex = ts.examples[i * 3 % ts.examples.size()];
    batch.inputs.emplace_back(ex.bits.data(), ex.bits.size());
    batch.task_ids.push_back(ex.task);
    batch.labels.push_back(ex.label);
    batch.weights.push_back(ex.weight);
  }
  const Gradients g = loss_and_gradient(net, batch);
  apply_update(net, g, 0.05);
  const double after = loss_and_gradient(net, batch).loss;
  CHECK(after < g.loss);
  CHECK(net.finite());
}

TEST_CASE("training reduces the pool loss over time") {
  data::Collection c = small_collection(8);
  NetworkConfig cfg = tiny_config(c, 2);
  cfg.n_steps = 800;
  cfg.learning_rate = 0.1;
  TrainSet ts = build_train_set(c, c.dataset_ids());

  // fixed evaluation batch spanning the pool
  Minibatch probe;
  for (std::size_t i = 0; i < ts.examples.size(); i += 4) {
    const TrainExample& ex = ts.examples[i];
    probe.inputs.emplace_back(ex.bits.data(), ex.bits.size());
    probe.task_ids.push_back(ex.task);
    probe.labels.push_back(ex.label);
    probe.weights.push_back(ex.weight);
  }
  MultitaskNetwork net = init(cfg);
  const double before = loss_and_gradient(net, probe).loss;
  train(net, ts);
  const double after = loss_and_gradient(net, probe).loss;
  CHECK(after < before);
  CHECK(net.finite());
}

TEST_CASE("training is deterministic for identical config, data and seed") {
  data::Collection c = small_collection(13);
  NetworkConfig cfg = tiny_config(c, 2);
  cfg.dropout_rate = 0.25;
  TrainSet ts = build_train_set(c, c.dataset_ids());
  MultitaskNetwork a = init(cfg);
  train(a, ts);
  MultitaskNetwork b = init(cfg);
  train(b, ts);
  CHECK(flatten(a) == flatten(b));
}

TEST_CASE("lr schedule switches the rate at the given step") {
  data::Collection c = small_collection(17);
  NetworkConfig cfg = tiny_config(c, 2);
  cfg.n_steps = 10;
  cfg.learning_rate = 0.05;
  cfg.lr_schedule = {{5, 0.0}};  // freeze after step 5
  MultitaskNetwork net = init(cfg);
  TrainSet ts = build_train_set(c, c.dataset_ids());
  train(net, ts);
  const std::vector<double> frozen = flatten(net);

  // training 5 more steps changes nothing: rate is 0 from step 5 on
  cfg.n_steps = 5;
  MultitaskNetwork resume = net;
  resume.config.n_steps = 5;
  train(resume, ts);
  CHECK(flatten(resume) == frozen);
}

TEST_CASE("replica equivalence: 4 workers reproduce 1 worker within 1e-8") {
  data::Collection c = small_collection(19, 2, 600);
  NetworkConfig cfg = tiny_config(c, 2);
  cfg.batch_size = 64;
  cfg.n_steps = 100;
  cfg.dropout_rate = 0.25;  // masks are per-example, so they shard cleanly
  TrainSet ts = build_train_set(c, c.dataset_ids());

  NetworkConfig cfg1 = cfg;
  cfg1.n_workers = 1;
  MultitaskNetwork single = init(cfg1);
  train(single, ts);

  NetworkConfig cfg4 = cfg;
  cfg4.n_workers = 4;
  MultitaskNetwork sharded = init(cfg4);
  train(sharded, ts);

  const auto a = flatten(single);
  const auto b = flatten(sharded);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max(1e-12, std::fabs(a[i]));
    CHECK(std::fabs(a[i] - b[i]) / scale < 1e-8);
  }
}

TEST_CASE("trained network separates planted actives") {
  data::Collection c = small_collection(23, 1, 1200);
  NetworkConfig cfg = tiny_config(c, 1);
  cfg.n_steps = 400;
  cfg.learning_rate = 0.1;
  MultitaskNetwork net = init(cfg);
  TrainSet ts = build_train_set(c, {c.datasets[0].id});
  train(net, ts);

  const data::Dataset& d = c.datasets[0];
  std::vector<std::size_t> all(d.records.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  metrics::ScoredSet s;
  s.scores = score_records(net, d.records, all, 0);
  for (const data::Record& r : d.records) s.labels.push_back(r.label);
  CHECK(metrics::roc_auc(s) > 0.95);  // noiseless planted motif is learnable
}

TEST_CASE("transplant copies hidden layers and fine-tunes from them") {
  data::Collection c = small_collection(29);
  NetworkConfig cfg = tiny_config(c, 2);
  MultitaskNetwork source = init(cfg);
  TrainSet ts = build_train_set(c, c.dataset_ids());
  train(source, ts);

  NetworkConfig target = cfg;
  target.n_tasks = 1;
  target.seed = 999;
  MultitaskNetwork moved = transplant(source, target);
  CHECK(moved.layers[0].w == source.layers[0].w);
  CHECK(moved.layers[1].b == source.layers[1].b);
  CHECK(moved.heads.size() == 1);
  // fresh head differs from both source heads
  CHECK(moved.heads[0].data() != source.heads[0].data());

  NetworkConfig bad = target;
  bad.hidden_sizes = {16, 4};
  CHECK_THROWS_AS(transplant(source, bad), DataError);
}

TEST_CASE("checkpoint round trip is bit exact") {
  data::Collection c = small_collection(31);
  NetworkConfig cfg = tiny_config(c, 2);
  MultitaskNetwork net = init(cfg);
  TrainSet ts = build_train_set(c, c.dataset_ids());
  train(net, ts);

  const std::string path = "test_ckpt_roundtrip.bin";
  save_checkpoint(net, path);
  MultitaskNetwork back = load_checkpoint(path);
  CHECK(flatten(back) == flatten(net));
  CHECK(back.step == net.step);
  CHECK(back.config.hidden_sizes == net.config.hidden_sizes);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_checkpoint("/nonexistent.ckpt"), DataError);
}

TEST_CASE("empty training pool and task range errors") {
  data::Collection c = small_collection(37);
  CHECK_THROWS_AS(build_train_set(c, {"missing"}), DataError);

  NetworkConfig cfg = tiny_config(c, 1);
  MultitaskNetwork net = init(cfg);
  TrainSet ts = build_train_set(c, c.dataset_ids());  // tasks 0 and 1
  CHECK_THROWS_AS(train(net, ts), DataError);         // task 1 out of range
}

TEST_CASE("fold-filtered training set excludes the held-out fold") {
  data::Collection c = small_collection(41);
  auto folds = data::assign_folds(c, 4, 11);
  const std::string id = c.datasets[0].id;
  TrainSet ts = build_train_set(c, {id}, &folds, 2);
  std::size_t expected = 0;
  for (int f : folds.at(id).fold_of) expected += f != 2;
  CHECK(ts.examples.size() == expected);
}
