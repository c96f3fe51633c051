#include <array>
#include <cmath>
#include <vector>

#include "coref/rng.hpp"
#include "coref/scorer.hpp"
#include "doctest.h"
#include "support/dense.hpp"
#include "support/fd.hpp"

using coref::testing::ffnn_oracle;
using coref::testing::rep_row;
using namespace coref;

namespace {

struct Fixture {
  ScorerConfig cfg;
  ParamStore ps;
  Document doc;
  std::vector<Span> spans;
  Tensor reps;

  explicit Fixture(uint64_t seed, int n_spans = 6, int g_dim = 5, int hidden = 8) {
    cfg.g_dim = g_dim;
    cfg.hidden = hidden;
    cfg.feat_dim = 3;
    Rng rng(seed);
    register_scorer_params(ps, cfg, rng);

    doc.tokens.assign(20, "w");
    doc.sentence_starts = {0};
    doc.speakers.assign(20, "s0");
    for (int t = 10; t < 20; ++t) doc.speakers[t] = "s1";
    doc.genre = 2;
    for (int i = 0; i < n_spans; ++i) spans.push_back(Span{2 * i, 2 * i + 1});

    reps = Tensor(n_spans, g_dim);
    Rng data(seed + 1);
    for (double& v : reps.data) v = data.uniform(-1.0, 1.0);
  }

  PairContext ctx() const { return PairContext{&doc, &spans}; }
};

}  // namespace

TEST_CASE("distance buckets") {
  CHECK(distance_bucket(1) == 0);
  CHECK(distance_bucket(2) == 1);
  CHECK(distance_bucket(3) == 2);
  CHECK(distance_bucket(4) == 3);
  CHECK(distance_bucket(5) == 4);
  CHECK(distance_bucket(7) == 4);
  CHECK(distance_bucket(8) == 5);
  CHECK(distance_bucket(15) == 5);
  CHECK(distance_bucket(16) == 6);
  CHECK(distance_bucket(31) == 6);
  CHECK(distance_bucket(32) == 7);
  CHECK(distance_bucket(40) == 7);
  CHECK(distance_bucket(63) == 7);
  CHECK(distance_bucket(64) == 8);
  CHECK(distance_bucket(1000) == 8);
  CHECK_THROWS_AS(distance_bucket(0), CorefError);
}

TEST_CASE("zero final projection zeroes the score; doubling it doubles the score") {
  Fixture fx(61);
  Graph g;
  Scorer sc = Scorer::bind(g, fx.ps, fx.cfg);
  NodeId reps = g.leaf(fx.reps, false);
  NodeId col = sc.mention_scores(g, reps);
  std::vector<double> base = g.value(col).data;

  Fixture zeroed(61);
  zeroed.ps.value("scr.m.out") = Tensor(fx.cfg.hidden, 1);
  Graph g0;
  NodeId col0 = Scorer::bind(g0, zeroed.ps, zeroed.cfg).mention_scores(g0, g0.leaf(fx.reps, false));
  for (double v : g0.value(col0).data) CHECK(v == 0.0);

  Fixture doubled(61);
  for (double& v : doubled.ps.value("scr.m.out").data) v *= 2.0;
  Graph g2;
  NodeId col2 =
      Scorer::bind(g2, doubled.ps, doubled.cfg).mention_scores(g2, g2.leaf(fx.reps, false));
  for (size_t i = 0; i < base.size(); ++i)
    CHECK(g2.value(col2).data[i] == doctest::Approx(2.0 * base[i]).epsilon(1e-12));
}

TEST_CASE("mention scores match an independent dense evaluation") {
  Fixture fx(67);
  Graph g;
  Scorer sc = Scorer::bind(g, fx.ps, fx.cfg);
  NodeId col = sc.mention_scores(g, g.leaf(fx.reps, false));
  for (int i = 0; i < fx.reps.rows(); ++i) {
    const double expect = ffnn_oracle(rep_row(fx.reps, i), fx.ps, "scr.m");
    CHECK(g.value(col).at(i, 0) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("pair features pick speaker match, genre and distance rows") {
  Fixture fx(71);
  Graph g;
  Scorer sc = Scorer::bind(g, fx.ps, fx.cfg);
  // spans 0..4 start at tokens 0..8 (speaker s0); span 5 starts at 10 (s1)
  std::vector<std::pair<int, int>> pairs = {{5, 4}, {3, 1}};
  NodeId phi = sc.pair_feature_rows(g, fx.ctx(), pairs);
  const Tensor& v = g.value(phi);
  REQUIRE(v.cols() == 3 * fx.cfg.feat_dim);

  const Tensor& spk = fx.ps.value("scr.feat.speaker");
  const Tensor& gen = fx.ps.value("scr.feat.genre");
  const Tensor& dst = fx.ps.value("scr.feat.dist");
  // pair (5,4): different speakers -> row 0; gap 1 -> bucket 0
  for (int c = 0; c < fx.cfg.feat_dim; ++c) {
    CHECK(v.at(0, c) == spk.at(0, c));
    CHECK(v.at(0, fx.cfg.feat_dim + c) == gen.at(2, c));
    CHECK(v.at(0, 2 * fx.cfg.feat_dim + c) == dst.at(0, c));
  }
  // pair (3,1): same speaker -> row 1; gap 2 -> bucket 1
  for (int c = 0; c < fx.cfg.feat_dim; ++c) {
    CHECK(v.at(1, c) == spk.at(1, c));
    CHECK(v.at(1, 2 * fx.cfg.feat_dim + c) == dst.at(1, c));
  }

  CHECK_THROWS_AS(sc.pair_feature_rows(g, fx.ctx(), {{1, 1}}), CorefError);
  Document bad_genre = fx.doc;
  bad_genre.genre = 99;
  PairContext bad{&bad_genre, &fx.spans};
  CHECK_THROWS_AS(sc.pair_feature_rows(g, bad, {{1, 0}}), CorefError);
}

TEST_CASE("antecedent score is order-sensitive and matches dense oracle") {
  Fixture fx(73);
  Graph g;
  Scorer sc = Scorer::bind(g, fx.ps, fx.cfg);
  NodeId reps = g.leaf(fx.reps, false);
  std::vector<std::pair<int, int>> pairs = {{3, 1}};
  NodeId col = sc.antecedent_scores(g, reps, fx.ctx(), pairs);

  // oracle on [g_i, g_j, g_i*g_j, phi]
  auto gi = rep_row(fx.reps, 3);
  auto gj = rep_row(fx.reps, 1);
  std::vector<double> x;
  x.insert(x.end(), gi.begin(), gi.end());
  x.insert(x.end(), gj.begin(), gj.end());
  for (size_t k = 0; k < gi.size(); ++k) x.push_back(gi[k] * gj[k]);
  const Tensor& spk = fx.ps.value("scr.feat.speaker");
  const Tensor& gen = fx.ps.value("scr.feat.genre");
  const Tensor& dst = fx.ps.value("scr.feat.dist");
  for (int c = 0; c < fx.cfg.feat_dim; ++c) x.push_back(spk.at(1, c));
  for (int c = 0; c < fx.cfg.feat_dim; ++c) x.push_back(gen.at(2, c));
  for (int c = 0; c < fx.cfg.feat_dim; ++c) x.push_back(dst.at(distance_bucket(2), c));
  CHECK(g.value(col).at(0, 0) == doctest::Approx(ffnn_oracle(x, fx.ps, "scr.a")).epsilon(1e-12));

  // swapping the representation rows of i and j changes the score
  Tensor swapped = fx.reps;
  for (int c = 0; c < fx.cfg.g_dim; ++c) std::swap(swapped.at(3, c), swapped.at(1, c));
  Graph g2;
  Scorer sc2 = Scorer::bind(g2, fx.ps, fx.cfg);
  NodeId col2 = sc2.antecedent_scores(g2, g2.leaf(swapped, false), fx.ctx(), pairs);
  CHECK(g.value(col).at(0, 0) != g2.value(col2).at(0, 0));
}

TEST_CASE("full pair score equals the sum of its components on random pairs") {
  Fixture fx(79, 12);
  Graph g;
  Scorer sc = Scorer::bind(g, fx.ps, fx.cfg);
  NodeId reps = g.leaf(fx.reps, false);
  NodeId ment = sc.mention_scores(g, reps);

  Rng rng(83);
  std::vector<std::pair<int, int>> pairs;
  for (int k = 0; k < 1000; ++k) {
    const int i = rng.uniform_int(1, 11);
    pairs.emplace_back(i, rng.uniform_int(0, i - 1));
  }
  NodeId sa = sc.antecedent_scores(g, reps, fx.ctx(), pairs);
  NodeId full = sc.full_pair_scores(g, ment, sa, pairs);
  for (size_t k = 0; k < pairs.size(); ++k) {
    const double expect = g.value(ment).at(pairs[k].first, 0) +
                          g.value(ment).at(pairs[k].second, 0) +
                          g.value(sa).at(static_cast<int>(k), 0);
    CHECK(g.value(full).at(static_cast<int>(k), 0) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("second-order score: dense oracle, zero projection, range check") {
  Fixture fx(89);
  Graph g;
  Scorer sc = Scorer::bind(g, fx.ps, fx.cfg);
  NodeId reps = g.leaf(fx.reps, false);
  std::vector<std::array<int, 3>> triples = {{4, 1, 2}, {5, 0, 3}};
  NodeId col = sc.second_order_scores(g, reps, triples);

  for (size_t t = 0; t < triples.size(); ++t) {
    std::vector<double> x;
    for (int part : {triples[t][0], triples[t][1], triples[t][2]}) {
      auto row = rep_row(fx.reps, part);
      x.insert(x.end(), row.begin(), row.end());
    }
    CHECK(g.value(col).at(static_cast<int>(t), 0) ==
          doctest::Approx(ffnn_oracle(x, fx.ps, "scr.p")).epsilon(1e-12));
  }

  CHECK_THROWS_AS(sc.second_order_scores(g, reps, {{4, 2, 2}}), CorefError);
  CHECK_THROWS_AS(sc.second_order_scores(g, reps, {{4, 1, 4}}), CorefError);

  Fixture zp(89);
  zp.ps.value("scr.p.out") = Tensor(fx.cfg.hidden, 1);
  Graph g0;
  NodeId c0 = Scorer::bind(g0, zp.ps, zp.cfg).second_order_scores(g0, g0.leaf(fx.reps, false),
                                                                  triples);
  for (double v : g0.value(c0).data) CHECK(v == 0.0);
}

TEST_CASE("arc pair combination endpoints and affinity") {
  CHECK(arc_pair_learned(3.0, 100.0, 1.0) == doctest::Approx(3.0));
  CHECK(arc_pair_learned(3.0, 100.0, 0.0) == doctest::Approx(100.0));
  CHECK(arc_pair_learned(2.0, 5.0, 0.8) == doctest::Approx(0.8 * 2.0 + 0.2 * 5.0));
  // affine in (s, s_p)
  Rng rng(97);
  for (int k = 0; k < 50; ++k) {
    const double s = rng.uniform(-3, 3), sp = rng.uniform(-3, 3), t = rng.uniform(-3, 3);
    CHECK(arc_pair_learned(s + t, sp, 0.8) - arc_pair_learned(s, sp, 0.8) ==
          doctest::Approx(0.8 * t).epsilon(1e-9));
    CHECK(arc_pair_learned(s, sp + t, 0.8) - arc_pair_learned(s, sp, 0.8) ==
          doctest::Approx(0.2 * t).epsilon(1e-9));
  }
  CHECK(arc_pair_ablation(1.0, 2.0, 3.0) == doctest::Approx(6.0));
}

TEST_CASE("antecedent scorer gradients match finite differences") {
  Fixture fx(101, 4, 4, 5);
  Graph g;
  Scorer sc = Scorer::bind(g, fx.ps, fx.cfg);
  NodeId reps = g.leaf(fx.reps, true);
  std::vector<std::pair<int, int>> pairs = {{2, 0}, {3, 1}, {3, 2}};
  NodeId ment = sc.mention_scores(g, reps);
  NodeId sa = sc.antecedent_scores(g, reps, fx.ctx(), pairs);
  NodeId full = sc.full_pair_scores(g, ment, sa, pairs);
  NodeId loss = g.sum_all(g.mul(full, full));

  auto res = coref::testing::fd_check(
      g, loss,
      {sc.a_w1, sc.a_b1, sc.a_w2, sc.a_b2, sc.a_out, sc.m_w1, sc.m_out, sc.feat_speaker,
       sc.feat_genre, sc.feat_dist, reps});
  CHECK(res.checked > 100);
  CHECK(res.max_rel_err < 1e-4);
}
