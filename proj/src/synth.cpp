#include "vscreen/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "vscreen/core/rng.hpp"

namespace vscreen::data {

namespace {

const char* kSynthClasses[] = {"alpha", "beta", "gamma", "delta"};

struct TaskRule {
  std::size_t rule = 0;       // index into rule tables
  bool holdout = false;
  bool duplicate = false;
};

}  // namespace

Collection synth_collection(const SynthSpec& spec) {
  if (!(spec.active_rate > 0.0 && spec.active_rate <= 0.5))
    throw DataError("synth active_rate must lie in (0, 0.5]");
  if (spec.n_tasks == 0 || spec.n_compounds == 0)
    throw DataError("synth collection needs at least one task and compound");
  if (spec.n_duplicate_pairs * 2 > spec.n_tasks)
    throw DataError("more duplicate pairs than tasks allow");
  if (spec.motif_bits == 0) throw DataError("motif_bits must be positive");

  const std::size_t n_main = spec.n_tasks;
  const std::size_t n_total =
      n_main + spec.n_holdout_shared + spec.n_holdout_disjoint;

  // Tasks sharing a rule have byte-identical activity before label noise.
  // Duplicate pairs are (0,1), (2,3), ... over the first 2*pairs tasks;
  // grading below runs over rules, so twins share one grade.
  std::vector<TaskRule> tasks(n_total);
  std::size_t n_rules = 0;
  for (std::size_t t = 0; t < n_main; ++t) {
    if (t < 2 * spec.n_duplicate_pairs) {
      tasks[t].rule = t / 2;
      tasks[t].duplicate = true;
      if (t % 2 == 0) ++n_rules;
    } else {
      tasks[t].rule = n_rules++;
    }
  }
  const std::size_t n_main_rules = n_rules;
  for (std::size_t t = n_main; t < n_total; ++t) {
    tasks[t].rule = n_rules++;
    tasks[t].holdout = true;
  }

  const std::size_t n_motifs = spec.shared_motif_count + n_rules;
  if (n_motifs * spec.motif_bits > spec.nbits)
    throw DataError("infeasible synth parameters: motifs exceed nbits");

  Rng rng(spec.seed);

  // Disjoint motif bit positions.
  std::vector<std::size_t> positions(spec.nbits);
  std::iota(positions.begin(), positions.end(), 0);
  rng.shuffle(positions);
  std::vector<std::vector<std::size_t>> shared_motif(spec.shared_motif_count);
  std::vector<std::vector<std::size_t>> private_motif(n_rules);
  std::size_t cursor = 0;
  for (auto& m : shared_motif)
    for (std::size_t b = 0; b < spec.motif_bits; ++b)
      m.push_back(positions[cursor++]);
  for (auto& m : private_motif)
    for (std::size_t b = 0; b < spec.motif_bits; ++b)
      m.push_back(positions[cursor++]);

  // Rule r of the main collection is wired to shared motifs {0..wired[r]-1};
  // the grading runs from 0 up to all shared motifs. Held-out "shared" rules
  // get full wiring, "disjoint" ones none.
  std::vector<std::size_t> wired(n_rules, 0);
  const std::size_t m = spec.shared_motif_count;
  for (std::size_t r = 0; r < n_main_rules; ++r)
    wired[r] = n_main_rules > 1
                   ? static_cast<std::size_t>(std::llround(
                         static_cast<double>(m) * static_cast<double>(r) /
                         static_cast<double>(n_main_rules - 1)))
                   : m;
  {
    std::size_t r = n_main_rules;
    for (std::size_t i = 0; i < spec.n_holdout_shared; ++i) wired[r++] = m;
    for (std::size_t i = 0; i < spec.n_holdout_disjoint; ++i) wired[r++] = 0;
  }

  // Implant probabilities chosen so every rule's total activity probability
  // equals active_rate: pi per shared motif, the remainder on the private
  // motif of each rule.
  const double pi = m > 0 ? spec.active_rate * spec.sigma_max / static_cast<double>(m) : 0.0;
  std::vector<double> private_prob(n_rules);
  for (std::size_t r = 0; r < n_rules; ++r) {
    private_prob[r] = spec.active_rate - pi * static_cast<double>(wired[r]);
    if (private_prob[r] < 0.0)
      throw DataError("infeasible synth parameters: sigma_max too large");
  }
  double implant_total = pi * static_cast<double>(m);
  for (double p : private_prob) implant_total += p;
  if (implant_total >= 1.0)
    throw DataError("infeasible synth parameters: implant probability >= 1");

  // Compound universe. Implant index: 0..m-1 shared, m+r private, -1 none.
  const std::size_t n = spec.n_compounds;
  std::vector<chem::Fingerprint> fps(n, chem::Fingerprint(spec.nbits));
  std::vector<int> implant(n, -1);
  Rng bg_rng = rng.derive(1);
  Rng implant_rng = rng.derive(2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t bit = 0; bit < spec.nbits; ++bit)
      if (bg_rng.bernoulli(spec.bg_density)) fps[i].set(bit);
    double u = implant_rng.uniform();
    for (std::size_t j = 0; j < m && implant[i] < 0; ++j) {
      if (u < pi) implant[i] = static_cast<int>(j);
      u -= pi;
    }
    for (std::size_t r = 0; r < n_rules && implant[i] < 0; ++r) {
      if (u < private_prob[r]) implant[i] = static_cast<int>(m + r);
      u -= private_prob[r];
    }
    if (implant[i] >= 0) {
      const auto& bits = implant[i] < static_cast<int>(m)
                             ? shared_motif[implant[i]]
                             : private_motif[implant[i] - static_cast<int>(m)];
      for (std::size_t bit : bits) fps[i].set(bit);
    }
  }

  auto rule_active = [&](std::size_t rule, std::size_t compound) {
    int imp = implant[compound];
    if (imp < 0) return false;
    if (imp >= static_cast<int>(m))
      return static_cast<std::size_t>(imp - static_cast<int>(m)) == rule;
    return static_cast<std::size_t>(imp) < wired[rule];
  };

  Collection c;
  c.nbits = spec.nbits;
  c.match_mode = MatchMode::CompoundId;

  char buf[32];
  for (std::size_t t = 0; t < n_total; ++t) {
    Dataset d;
    std::snprintf(buf, sizeof(buf), "synth-%03zu", t);
    d.id = buf;
    d.group = Group::SYNTH;
    d.target_class = kSynthClasses[t % 4];
    std::snprintf(buf, sizeof(buf), "rule-%03zu", tasks[t].rule);
    d.target = buf;
    d.duplicate_target = tasks[t].duplicate;

    Rng flip_rng = rng.derive(100 + t);
    d.records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Record r;
      std::snprintf(buf, sizeof(buf), "c%06zu", i);
      r.compound_id = buf;
      r.fingerprint = fps[i];
      bool active = rule_active(tasks[t].rule, i);
      if (spec.flip_rate > 0.0 && flip_rng.bernoulli(spec.flip_rate))
        active = !active;
      r.label = active ? 1 : 0;
      d.records.push_back(std::move(r));
    }
    if (d.n_active() == 0 || d.n_inactive() == 0)
      throw DataError(d.id + ": synthetic dataset came out single-class; "
                              "use more compounds or a different seed");
    c.datasets.push_back(std::move(d));
  }

  // Held-in: spread evenly across the grading. Held-out: the extra tasks.
  const std::size_t held = std::min(spec.held_in_count, n_main);
  std::set<std::size_t> held_idx;
  for (std::size_t i = 0; i < held; ++i) {
    std::size_t idx = held == 1 ? 0
                                : static_cast<std::size_t>(std::llround(
                                      static_cast<double>(i) *
                                      static_cast<double>(n_main - 1) /
                                      static_cast<double>(held - 1)));
    held_idx.insert(idx);
  }
  for (std::size_t idx : held_idx) c.held_in.push_back(c.datasets[idx].id);
  for (std::size_t t = n_main; t < n_total; ++t)
    c.held_out.push_back(c.datasets[t].id);

  c.validate();
  return c;
}

}  // namespace vscreen::data
