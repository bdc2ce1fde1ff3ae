#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "vscreen/core/rng.hpp"
#include "vscreen/metrics/ranking.hpp"
#include "vscreen/metrics/report.hpp"

using namespace vscreen;
using namespace vscreen::metrics;

TEST_CASE("roc_auc on the worked examples") {
  CHECK(roc_auc({{.9, .8, .3, .2}, {1, 1, 0, 0}}) == doctest::Approx(1.0));
  // pairwise oracle: 3 of 4 positive/negative pairs ordered correctly
  CHECK(oracle::auc_pairwise({.1, .2, .3, .4}, {0, 1, 0, 1}) ==
        doctest::Approx(0.75));
  CHECK(roc_auc({{.1, .2, .3, .4}, {0, 1, 0, 1}}) == doctest::Approx(0.75));
  CHECK(roc_auc({{.5, .5, .5, .5}, {1, 0, 1, 0}}) == doctest::Approx(0.5));
}

TEST_CASE("roc_auc equals the pairwise oracle on random sets with ties") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(198);
    ScoredSet s;
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      // coarse grid of scores forces plenty of ties
      s.scores.push_back(static_cast<double>(rng.uniform_index(12)) / 11.0);
      s.labels.push_back(rng.bernoulli(0.3) ? 1 : 0);
      has_pos |= s.labels.back() == 1;
      has_neg |= s.labels.back() == 0;
    }
    if (!has_pos) s.labels[0] = 1;
    if (!has_neg) s.labels[n - 1] = 0;
    const double expect = oracle::auc_pairwise(s.scores, s.labels);
    CHECK(roc_auc(s) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("roc_auc rejects single-class input") {
  CHECK_THROWS_AS(roc_auc({{.1, .2}, {1, 1}}), DataError);
  CHECK_THROWS_AS(roc_auc({{.1, .2}, {0, 0}}), DataError);
}

TEST_CASE("auc invariance under monotone transforms and complement symmetry") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    ScoredSet s;
    for (int i = 0; i < 60; ++i) {
      s.scores.push_back(rng.uniform());
      s.labels.push_back(rng.bernoulli(0.4) ? 1 : 0);
    }
    s.labels[0] = 1;
    s.labels[1] = 0;
    const double base = roc_auc(s);

    ScoredSet t = s;
    for (double& x : t.scores) x = std::exp(3.0 * x) + 1.0;  // strictly increasing
    CHECK(roc_auc(t) == doctest::Approx(base).epsilon(1e-12));

    ScoredSet r = s;
    for (double& x : r.scores) x = -x;
    CHECK(roc_auc(r) == doctest::Approx(1.0 - base).epsilon(1e-12));
  }
}

TEST_CASE("enrichment of a perfect classifier is 1/fpr on the whole grid") {
  ScoredSet s;
  for (int i = 0; i < 50; ++i) {
    s.scores.push_back(i < 10 ? 1.0 + i : -static_cast<double>(i));
    s.labels.push_back(i < 10 ? 1 : 0);
  }
  for (double fpr : kEnrichmentFprGrid)
    CHECK(roc_enrichment(s, fpr) == doctest::Approx(1.0 / fpr));
}

TEST_CASE("enrichment of an inverted classifier is 0") {
  ScoredSet s;
  for (int i = 0; i < 40; ++i) {
    s.scores.push_back(i < 10 ? 0.0 : 1.0);  // positives scored lowest
    s.labels.push_back(i < 10 ? 1 : 0);
  }
  CHECK(roc_enrichment(s, 0.05) == doctest::Approx(0.0));
}

TEST_CASE("random-score enrichment is about 1") {
  Rng rng(99);
  double total = 0.0;
  const int trials = 10000;
  for (int trial = 0; trial < trials; ++trial) {
    ScoredSet s;
    for (int i = 0; i < 200; ++i) {
      s.scores.push_back(rng.uniform());
      s.labels.push_back(i < 20 ? 1 : 0);
    }
    total += roc_enrichment(s, 0.05);
  }
  CHECK(total / trials == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("enrichment near fpr=1 tends to 1") {
  Rng rng(5);
  ScoredSet s;
  for (int i = 0; i < 100; ++i) {
    s.scores.push_back(rng.uniform());
    s.labels.push_back(rng.bernoulli(0.3) ? 1 : 0);
  }
  s.labels[0] = 1;
  s.labels[1] = 0;
  CHECK(roc_enrichment(s, 0.999) == doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS_AS(roc_enrichment(s, 0.0), DataError);
  CHECK_THROWS_AS(roc_enrichment(s, 1.0), DataError);
}

TEST_CASE("kfold average and mean/median") {
  CHECK(kfold_average({.8, .8, .8, .8, .8}) == doctest::Approx(.8));
  auto mm = mean_median({.7, .9});
  CHECK(mm.mean == doctest::Approx(.8));
  CHECK(mm.median == doctest::Approx(.8));
  mm = mean_median({.1, .2, .9});
  CHECK(mm.median == doctest::Approx(.2));
  CHECK_THROWS_AS(kfold_average({}), DataError);
}

TEST_CASE("logit and delta log odds") {
  CHECK(logit(0.5) == doctest::Approx(0.0));
  CHECK(delta_log_odds_auc(0.9, 0.8) ==
        doctest::Approx(std::log(9.0) - std::log(4.0)));  // ~0.8109
  CHECK(delta_log_odds_auc(0.9, 0.8) == doctest::Approx(0.81093).epsilon(1e-4));
  CHECK(delta_log_odds_auc(0.7, 0.7) == 0.0);
  // clamping keeps extremes finite; order is preserved up to the clamp bound
  CHECK(std::isfinite(logit(1.0)));
  CHECK(std::isfinite(logit(0.0)));
  CHECK(logit(1.0) == logit(1.0 - 1e-4));
  CHECK(logit(0.9999) > logit(0.999));

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(), b = rng.uniform();
    const double d = delta_log_odds_auc(a, b);
    if (a > b) CHECK(d > 0.0);
    if (a < b) CHECK(d < 0.0);
  }
}

TEST_CASE("report aggregates recompute from fold rows") {
  EvalReport r;
  r.model = "toy";
  r.folds = 2;
  r.add("d1", "PCBA", 0, "auc", 0.7);
  r.add("d1", "PCBA", 1, "auc", 0.9);
  r.add("d2", "PCBA", 0, "auc", 0.6);
  r.add("d2", "PCBA", 1, "auc", 0.6);
  r.add("d3", "MUV", 0, "auc", 1.0);
  r.add("d3", "MUV", 1, "auc", 0.5);

  auto per_dataset = dataset_kfold_auc(r);
  CHECK(per_dataset["d1"] == doctest::Approx(0.8));
  CHECK(per_dataset["d2"] == doctest::Approx(0.6));
  auto groups = group_auc_summary(r);
  CHECK(groups["PCBA"].mean == doctest::Approx(0.7));
  CHECK(groups["PCBA"].median == doctest::Approx(0.7));
  CHECK(groups["MUV"].median == doctest::Approx(0.75));
}

TEST_CASE("report json round trip") {
  EvalReport r;
  r.model = "toy";
  r.folds = 1;
  r.add("d1", "SYNTH", 0, "auc", 0.875);
  r.add("d1", "SYNTH", 0, "enrichment@0.01", 42.5);
  const std::string path = "test_report_roundtrip.json";
  save_report_json(r, path);
  EvalReport back = load_report_json(path);
  CHECK(back.model == r.model);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[1].metric == "enrichment@0.01");
  CHECK(back.rows[0].value == doctest::Approx(0.875));
  std::remove(path.c_str());
}
