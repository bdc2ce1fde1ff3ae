#include "vscreen/net/network.hpp"

#include <cmath>

#include "vscreen/core/errors.hpp"
#include "vscreen/core/hash.hpp"

namespace vscreen::net {

namespace {

// Per-example forward workspace; dropped[l] is what the layer above sees.
struct Activations {
  std::vector<std::vector<double>> dropped;
  double top_abs_max = 0.0;
};

bool layer_has_dropout(const NetworkConfig& cfg, std::size_t layer) {
  if (cfg.dropout_rate <= 0.0) return false;
  return cfg.dropout_all_layers || layer == 0;
}

// Hidden stack only; the caller applies the head. Masks (as scale factors)
// are recorded when mask_out != nullptr so the backward pass can reuse them.
void run_hidden(const MultitaskNetwork& net, SparseInput input,
                bool train_mode, Rng* rng, Activations& acts,
                std::vector<std::vector<double>>* mask_out) {
  const auto& cfg = net.config;
  acts.dropped.resize(net.layers.size());
  const double keep = 1.0 - cfg.dropout_rate;

  const std::vector<double>* below = nullptr;  // null: sparse input
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    const std::size_t out_dim = layer.b.size();
    std::vector<double>& a = acts.dropped[l];
    a.assign(layer.b.begin(), layer.b.end());
    if (below == nullptr) {
      for (std::size_t o = 0; o < out_dim; ++o) {
        const double* row = layer.w.row(o);
        double z = a[o];
        for (std::uint32_t bit : input) z += row[bit];
        a[o] = z;
      }
    } else {
      const std::size_t in_dim = below->size();
      const double* x = below->data();
      for (std::size_t o = 0; o < out_dim; ++o) {
        const double* row = layer.w.row(o);
        double z = a[o];
        for (std::size_t i = 0; i < in_dim; ++i) z += row[i] * x[i];
        a[o] = z;
      }
    }
    for (double& v : a) v = v > 0.0 ? v : 0.0;  // ReLU

    const bool dropout = train_mode && layer_has_dropout(cfg, l);
    if (mask_out) (*mask_out)[l].assign(out_dim, 1.0);
    if (dropout) {
      for (std::size_t o = 0; o < out_dim; ++o) {
        const double scale = rng->bernoulli(keep) ? 1.0 / keep : 0.0;
        a[o] *= scale;
        if (mask_out) (*mask_out)[l][o] = scale;
      }
    }
    below = &a;
  }
  if (!net.layers.empty())
    for (double v : acts.dropped.back())
      acts.top_abs_max = std::max(acts.top_abs_max, std::fabs(v));
}

struct HeadOut {
  double p_active = 0.0;
  double z0 = 0.0, z1 = 0.0;
};

HeadOut head_softmax(const MultitaskNetwork& net, std::size_t task,
                     SparseInput input, const Activations& acts) {
  if (task >= net.heads.size()) throw DataError("task id out of range");
  const Matrix& head = net.heads[task];
  double z0 = 0.0, z1 = 0.0;
  if (net.layers.empty()) {
    const double* r0 = head.row(0);
    const double* r1 = head.row(1);
    for (std::uint32_t bit : input) {
      z0 += r0[bit];
      z1 += r1[bit];
    }
  } else {
    const std::vector<double>& top = acts.dropped.back();
    const double* r0 = head.row(0);
    const double* r1 = head.row(1);
    for (std::size_t i = 0; i < top.size(); ++i) {
      z0 += r0[i] * top[i];
      z1 += r1[i] * top[i];
    }
  }
  if (!std::isfinite(z0) || !std::isfinite(z1))
    throw NumericError("non-finite activation in forward pass");
  // softmax with max subtraction
  const double m = std::max(z0, z1);
  const double e0 = std::exp(z0 - m);
  const double e1 = std::exp(z1 - m);
  return {e1 / (e0 + e1), z0, z1};
}

}  // namespace

bool MultitaskNetwork::finite() const {
  auto ok = [](const std::vector<double>& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  for (const Layer& l : layers)
    if (!ok(l.w.data()) || !ok(l.b)) return false;
  for (const Matrix& h : heads)
    if (!ok(h.data())) return false;
  return true;
}

MultitaskNetwork init(const NetworkConfig& config) {
  config.validate();
  MultitaskNetwork net;
  net.config = config;
  Rng rng(config.seed);

  std::size_t in_dim = config.input_dim;
  for (std::size_t h : config.hidden_sizes) {
    Layer layer;
    layer.w = Matrix(h, in_dim);
    for (double& v : layer.w.data()) v = config.init_std * rng.gaussian();
    layer.b.assign(h, config.init_bias);
    net.layers.push_back(std::move(layer));
    in_dim = h;
  }
  for (std::size_t t = 0; t < config.n_tasks; ++t) {
    Matrix head(2, in_dim);
    for (double& v : head.data()) v = config.init_std * rng.gaussian();
    net.heads.push_back(std::move(head));
  }
  return net;
}

double forward(const MultitaskNetwork& net, SparseInput input,
               std::size_t task, bool train_mode, Rng* rng) {
  Rng local(0);
  if (train_mode && net.config.dropout_rate > 0.0 && rng == nullptr)
    throw DataError("train-mode forward with dropout needs an Rng");
  Activations acts;
  run_hidden(net, input, train_mode, rng ? rng : &local, acts, nullptr);
  return head_softmax(net, task, input, acts).p_active;
}

void Gradients::scale(double factor) {
  for (Layer& l : layers) {
    for (double& v : l.w.data()) v *= factor;
    for (double& v : l.b) v *= factor;
  }
  for (Matrix& h : heads)
    for (double& v : h.data()) v *= factor;
}

Gradients loss_and_gradient(const MultitaskNetwork& net,
                            const Minibatch& batch) {
  if (batch.size() == 0) throw DataError("empty minibatch");
  if (batch.task_ids.size() != batch.size() ||
      batch.labels.size() != batch.size() ||
      batch.weights.size() != batch.size())
    throw DataError("minibatch fields differ in length");
  const bool use_dropout = !batch.dropout_seeds.empty();
  if (use_dropout && batch.dropout_seeds.size() != batch.size())
    throw DataError("minibatch dropout seeds differ in length");

  Gradients g;
  g.layers.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    g.layers[l].w = Matrix(net.layers[l].w.rows(), net.layers[l].w.cols());
    g.layers[l].b.assign(net.layers[l].b.size(), 0.0);
  }
  g.heads.reserve(net.heads.size());
  for (const Matrix& h : net.heads) g.heads.emplace_back(h.rows(), h.cols());

  std::vector<std::vector<double>> masks(net.layers.size());
  Activations acts;
  std::vector<double> delta, delta_below;

  for (std::size_t e = 0; e < batch.size(); ++e) {
    const std::size_t task = batch.task_ids[e];
    if (task >= net.heads.size()) throw DataError("task id out of range");
    const int label = batch.labels[e];
    const double weight = batch.weights[e];

    Rng drop_rng(use_dropout ? batch.dropout_seeds[e] : 0);
    acts.top_abs_max = 0.0;
    run_hidden(net, batch.inputs[e], use_dropout, &drop_rng, acts, &masks);
    g.top_activation_max = std::max(g.top_activation_max, acts.top_abs_max);

    const HeadOut out = head_softmax(net, task, batch.inputs[e], acts);
    const double p_label = label != 0 ? out.p_active : 1.0 - out.p_active;
    const double ce = -std::log(std::max(p_label, 1e-300));
    if (!std::isfinite(ce))
      throw NumericError("non-finite loss in minibatch");
    g.loss += weight * ce;

    // softmax cross-entropy: dz_j = p_j - 1{j == label}, scaled by weight
    const double dz1 = weight * (out.p_active - (label != 0 ? 1.0 : 0.0));
    const double dz0 = weight * ((1.0 - out.p_active) - (label != 0 ? 0.0 : 1.0));

    Matrix& dhead = g.heads[task];
    if (net.layers.empty()) {
      for (std::uint32_t bit : batch.inputs[e]) {
        dhead(0, bit) += dz0;
        dhead(1, bit) += dz1;
      }
      continue;
    }

    const std::vector<double>& top = acts.dropped.back();
    const Matrix& head = net.heads[task];
    delta.assign(top.size(), 0.0);
    for (std::size_t i = 0; i < top.size(); ++i) {
      dhead(0, i) += dz0 * top[i];
      dhead(1, i) += dz1 * top[i];
      delta[i] = dz0 * head(0, i) + dz1 * head(1, i);
    }

    for (std::size_t l = net.layers.size(); l-- > 0;) {
      const Layer& layer = net.layers[l];
      Layer& dlayer = g.layers[l];
      const std::vector<double>& a = acts.dropped[l];
      // back through dropout scale, then the ReLU gate
      for (std::size_t o = 0; o < delta.size(); ++o) {
        delta[o] *= masks[l][o];
        if (a[o] <= 0.0) delta[o] = 0.0;
      }
      if (l == 0) {
        for (std::size_t o = 0; o < delta.size(); ++o) {
          const double d = delta[o];
          if (d == 0.0) continue;
          double* row = dlayer.w.row(o);
          for (std::uint32_t bit : batch.inputs[e]) row[bit] += d;
          dlayer.b[o] += d;
        }
      } else {
        const std::vector<double>& below = acts.dropped[l - 1];
        delta_below.assign(below.size(), 0.0);
        for (std::size_t o = 0; o < delta.size(); ++o) {
          const double d = delta[o];
          dlayer.b[o] += d;
          if (d == 0.0) continue;
          double* row = dlayer.w.row(o);
          const double* wrow = layer.w.row(o);
          for (std::size_t i = 0; i < below.size(); ++i) {
            row[i] += d * below[i];
            delta_below[i] += d * wrow[i];
          }
        }
        delta.swap(delta_below);
      }
    }
  }

  const double inv = 1.0 / static_cast<double>(batch.size());
  g.loss *= inv;
  g.scale(inv);
  g.count = batch.size();
  return g;
}

Gradients aggregate_gradients(const std::vector<Gradients>& shards) {
  if (shards.empty()) throw DataError("no gradients to aggregate");
  Gradients out = shards[0];
  if (shards.size() == 1) return out;
  double total = static_cast<double>(out.count);
  out.scale(total);
  out.loss *= total;
  for (std::size_t s = 1; s < shards.size(); ++s) {
    const Gradients& g = shards[s];
    if (g.layers.size() != out.layers.size() ||
        g.heads.size() != out.heads.size())
      throw DataError("gradient shapes differ");
    const double n = static_cast<double>(g.count);
    for (std::size_t l = 0; l < g.layers.size(); ++l) {
      if (!g.layers[l].w.same_shape(out.layers[l].w))
        throw DataError("gradient shapes differ");
      for (std::size_t i = 0; i < g.layers[l].w.size(); ++i)
        out.layers[l].w.data()[i] += n * g.layers[l].w.data()[i];
      for (std::size_t i = 0; i < g.layers[l].b.size(); ++i)
        out.layers[l].b[i] += n * g.layers[l].b[i];
    }
    for (std::size_t h = 0; h < g.heads.size(); ++h) {
      if (!g.heads[h].same_shape(out.heads[h]))
        throw DataError("gradient shapes differ");
      for (std::size_t i = 0; i < g.heads[h].size(); ++i)
        out.heads[h].data()[i] += n * g.heads[h].data()[i];
    }
    out.loss += n * g.loss;
    out.count += g.count;
    out.top_activation_max = std::max(out.top_activation_max, g.top_activation_max);
    total += n;
  }
  out.scale(1.0 / total);
  out.loss /= total;
  return out;
}

void apply_update(MultitaskNetwork& net, const Gradients& g, double lr) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& w = net.layers[l].w.data();
    const auto& dw = g.layers[l].w.data();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * dw[i];
    for (std::size_t i = 0; i < net.layers[l].b.size(); ++i)
      net.layers[l].b[i] -= lr * g.layers[l].b[i];
  }
  for (std::size_t h = 0; h < net.heads.size(); ++h) {
    auto& w = net.heads[h].data();
    const auto& dw = g.heads[h].data();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * dw[i];
  }
  ++net.step;
}

}  // namespace vscreen::net
