#include "vscreen/net/train.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "vscreen/core/hash.hpp"

namespace vscreen::net {

TrainSet build_train_set(
    const data::Collection& c, const std::vector<std::string>& dataset_ids,
    const std::map<std::string, data::FoldAssignment>* folds,
    int excluded_fold,
    const std::map<std::string, std::vector<std::size_t>>* subset) {
  TrainSet ts;
  ts.task_ids = dataset_ids;
  for (std::size_t task = 0; task < dataset_ids.size(); ++task) {
    const data::Dataset& d = c.dataset(dataset_ids[task]);
    const bool subsampled = subset && subset->count(d.id);

    std::vector<std::size_t> indices;
    if (subsampled) {
      indices = subset->at(d.id);
    } else {
      indices.resize(d.records.size());
      for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    }
    if (folds && excluded_fold >= 0) {
      const data::FoldAssignment& fa = folds->at(d.id);
      std::vector<std::size_t> kept;
      for (std::size_t i : indices)
        if (fa.fold_of[i] != excluded_fold) kept.push_back(i);
      indices.swap(kept);
    }

    std::size_t n_active = 0;
    for (std::size_t i : indices)
      n_active += static_cast<std::size_t>(d.records[i].label != 0);
    const std::size_t n_inactive = indices.size() - n_active;
    // A sampled side dataset may come out tiny or single-class; it then
    // contributes what it has at unit weight. Full datasets must carry both
    // classes.
    if (!subsampled && (n_active == 0 || n_inactive == 0))
      throw DataError(d.id + ": training pool needs both classes");
    // actives carry the dataset's inactive mass; inactives weigh 1
    const double active_weight =
        n_active > 0 && n_inactive > 0
            ? static_cast<double>(n_inactive) / static_cast<double>(n_active)
            : 1.0;

    for (std::size_t i : indices) {
      const data::Record& r = d.records[i];
      TrainExample ex;
      ex.bits = r.fingerprint.on_bits();
      ex.task = task;
      ex.label = r.label;
      ex.weight = r.weight * (r.label != 0 ? active_weight : 1.0);
      ts.examples.push_back(std::move(ex));
    }
  }
  if (ts.examples.empty()) throw DataError("empty training pool");
  return ts;
}

namespace {

double rate_at(const NetworkConfig& cfg, std::size_t step) {
  double lr = cfg.learning_rate;
  for (const auto& [from, rate] : cfg.lr_schedule)
    if (step >= from) lr = rate;
  return lr;
}

Minibatch make_shard(const TrainSet& ts, const std::vector<std::size_t>& picks,
                     const std::vector<std::uint64_t>& drop_seeds,
                     std::size_t begin, std::size_t end, bool dropout) {
  Minibatch b;
  b.inputs.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const TrainExample& ex = ts.examples[picks[i]];
    b.inputs.emplace_back(ex.bits.data(), ex.bits.size());
    b.task_ids.push_back(ex.task);
    b.labels.push_back(ex.label);
    b.weights.push_back(ex.weight);
    if (dropout) b.dropout_seeds.push_back(drop_seeds[i]);
  }
  return b;
}

}  // namespace

void train(MultitaskNetwork& net, const TrainSet& ts,
           const TrainOptions& opts) {
  const NetworkConfig& cfg = net.config;
  if (ts.examples.empty()) throw DataError("empty training pool");
  for (const TrainExample& ex : ts.examples)
    if (ex.task >= cfg.n_tasks)
      throw DataError("training example task out of range");

  const std::size_t B = cfg.batch_size;
  const bool dropout = cfg.dropout_rate > 0.0;
  const unsigned workers = std::max(1u, cfg.n_workers);

  std::vector<std::size_t> picks(B);
  std::vector<std::uint64_t> drop_seeds(B);

  const std::size_t first_step = net.step;
  for (std::size_t step = first_step; step < first_step + cfg.n_steps; ++step) {
    // batch sampling and dropout streams depend only on (seed, step, slot),
    // independent of worker count
    Rng step_rng(hash_combine(hash_combine(cfg.seed, 0x5ba7c4e5u), step));
    for (std::size_t i = 0; i < B; ++i) {
      picks[i] = step_rng.uniform_index(ts.examples.size());
      drop_seeds[i] =
          hash_combine(hash_combine(cfg.seed, step), 0xd509 + i);
    }

    Gradients agg;
    if (workers == 1 || B < 2 * workers) {
      Minibatch batch = make_shard(ts, picks, drop_seeds, 0, B, dropout);
      agg = loss_and_gradient(net, batch);
    } else {
      std::vector<Gradients> shards(workers);
      std::vector<std::thread> threads;
      const std::size_t per = B / workers;
      const std::size_t extra = B % workers;
      std::size_t begin = 0;
      std::vector<std::pair<std::size_t, std::size_t>> ranges;
      for (unsigned w = 0; w < workers; ++w) {
        const std::size_t len = per + (w < extra ? 1 : 0);
        ranges.emplace_back(begin, begin + len);
        begin += len;
      }
      for (unsigned w = 1; w < workers; ++w)
        threads.emplace_back([&, w] {
          Minibatch shard = make_shard(ts, picks, drop_seeds, ranges[w].first,
                                       ranges[w].second, dropout);
          shards[w] = loss_and_gradient(net, shard);
        });
      Minibatch shard =
          make_shard(ts, picks, drop_seeds, ranges[0].first, ranges[0].second, dropout);
      shards[0] = loss_and_gradient(net, shard);
      for (std::thread& t : threads) t.join();
      agg = aggregate_gradients(shards);
    }

    if (!std::isfinite(agg.loss))
      throw NumericError("training loss became non-finite at step " +
                         std::to_string(step));
    if (!net.layers.empty() && agg.top_activation_max == 0.0)
      throw NumericError(
          "top hidden layer zeroed itself out at step " + std::to_string(step) +
          "; lower the learning rate");

    apply_update(net, agg, rate_at(cfg, step));

    const bool last = step + 1 == first_step + cfg.n_steps;
    if (cfg.log_every && (step % cfg.log_every == 0 || last)) {
      if (opts.log) opts.log->push_back({step, agg.loss});
      if (opts.on_log && !opts.on_log(step, agg.loss)) return;
    }
  }
}

MultitaskNetwork transplant(const MultitaskNetwork& source,
                            const NetworkConfig& target) {
  if (target.input_dim != source.config.input_dim ||
      target.hidden_sizes != source.config.hidden_sizes)
    throw DataError("transplant requires identical input and hidden shapes");
  MultitaskNetwork net = init(target);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    net.layers[l].w = source.layers[l].w;
    net.layers[l].b = source.layers[l].b;
  }
  return net;
}

std::vector<double> score_records(const MultitaskNetwork& net,
                                  const std::vector<data::Record>& records,
                                  const std::vector<std::size_t>& indices,
                                  std::size_t task) {
  std::vector<double> scores;
  scores.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto bits = records[i].fingerprint.on_bits();
    scores.push_back(forward(net, {bits.data(), bits.size()}, task));
  }
  return scores;
}

}  // namespace vscreen::net
