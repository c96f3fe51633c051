#include <algorithm>
#include <set>

#include "coref/candidates.hpp"
#include "coref/rng.hpp"
#include "doctest.h"

using namespace coref;

namespace {

Document doc_of(int n_tokens, std::vector<int> sentences) {
  Document d;
  d.tokens.assign(n_tokens, "w");
  d.sentence_starts = std::move(sentences);
  d.speakers.assign(n_tokens, "");
  return d;
}

}  // namespace

TEST_CASE("span enumeration counts") {
  CHECK(enumerate_spans(doc_of(3, {0}), 3).size() == 6);  // T(T+1)/2 with T=3
  CHECK(enumerate_spans(doc_of(7, {0}), 1).size() == 7);
  CHECK(enumerate_spans(doc_of(4, {0, 2}), 4).size() == 6);  // 3 per sentence, no crossing

  // exhaustive oracle: every in-sentence span of admissible width, no others
  Rng rng(41);
  for (int round = 0; round < 20; ++round) {
    const int T = rng.uniform_int(1, 25);
    std::vector<int> starts = {0};
    for (int t = 1; t < T; ++t)
      if (rng.bernoulli(0.2)) starts.push_back(t);
    const int w = rng.uniform_int(1, 6);
    Document d = doc_of(T, starts);

    auto sentence_of = [&](int t) {
      int s = 0;
      for (size_t k = 0; k < starts.size(); ++k)
        if (starts[k] <= t) s = static_cast<int>(k);
      return s;
    };
    std::set<Span> expect;
    for (int b = 0; b < T; ++b)
      for (int e = b; e < T; ++e)
        if (e - b + 1 <= w && sentence_of(b) == sentence_of(e)) expect.insert(Span{b, e});

    auto got = enumerate_spans(d, w);
    CHECK(std::is_sorted(got.begin(), got.end()));
    CHECK(std::set<Span>(got.begin(), got.end()) == expect);
    CHECK(got.size() == expect.size());
  }
}

TEST_CASE("crossing test is symmetric and exact") {
  CHECK(spans_cross(Span{0, 2}, Span{1, 3}));
  CHECK(spans_cross(Span{1, 3}, Span{0, 2}));
  CHECK(!spans_cross(Span{0, 3}, Span{1, 2}));  // nested
  CHECK(!spans_cross(Span{0, 1}, Span{2, 3}));  // disjoint
  CHECK(!spans_cross(Span{0, 1}, Span{0, 1}));  // identical
  CHECK(spans_cross(Span{0, 1}, Span{1, 3}));  // shares one endpoint, not nested
}

TEST_CASE("pruning keeps top spans and suppresses crossing brackets") {
  std::vector<Span> spans = {Span{0, 2}, Span{1, 3}, Span{4, 4}};
  std::vector<double> s = {1.0, 5.0, 3.0};
  // cap is large; [0,2] crosses the higher-scoring [1,3] and is dropped
  auto kept = prune_mentions(spans, s, 10.0, 5);
  REQUIRE(kept.size() == 2);
  CHECK(spans[kept[0]] == Span{1, 3});
  CHECK(spans[kept[1]] == Span{4, 4});

  // no overlaps, generous ratio: identity in document order
  std::vector<Span> flat = {Span{0, 0}, Span{1, 1}, Span{2, 2}};
  std::vector<double> fs = {0.3, 0.1, 0.2};
  auto all = prune_mentions(flat, fs, 1.0, 3);
  CHECK(all == std::vector<int>{0, 1, 2});
}

TEST_CASE("pruning matches an independent re-implementation on random input") {
  Rng rng(43);
  for (int round = 0; round < 30; ++round) {
    const int T = 30;
    Document d = doc_of(T, {0});
    auto spans = enumerate_spans(d, 5);
    std::vector<double> s(spans.size());
    for (double& v : s) v = rng.uniform(-2.0, 2.0);

    auto got = prune_mentions(spans, s, 0.4, T);

    // oracle: same rule, written against index lists instead of greedy state
    const int cap = 12;  // ceil(0.4 * 30)
    std::vector<int> order(spans.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return s[a] > s[b] || (s[a] == s[b] && spans[a] < spans[b]);
    });
    std::vector<int> expect;
    for (int idx : order) {
      if (static_cast<int>(expect.size()) == cap) break;
      if (std::none_of(expect.begin(), expect.end(),
                       [&](int k) { return spans_cross(spans[idx], spans[k]); }))
        expect.push_back(idx);
    }
    std::sort(expect.begin(), expect.end(),
              [&](int a, int b) { return spans[a] < spans[b]; });
    CHECK(got == expect);
  }
}

TEST_CASE("candidate selection: edge cases and top-K oracle") {
  Rng rng(47);
  const int n = 10, d = 4;
  std::vector<double> s_m(n);
  for (double& v : s_m) v = rng.uniform(-1.0, 1.0);
  Tensor g(n, d), wc(d, d);
  for (double& v : g.data) v = rng.uniform(-1.0, 1.0);
  for (double& v : wc.data) v = rng.uniform(-1.0, 1.0);

  auto ys = select_candidate_antecedents(s_m, g, wc, 3);
  CHECK(ys[0].empty());
  for (int i = 0; i < n; ++i) {
    CHECK(static_cast<int>(ys[i].size()) == std::min(i, 3));
    for (int j : ys[i]) CHECK(j < i);
    CHECK(std::is_sorted(ys[i].begin(), ys[i].end()));
  }

  // K >= i: everything
  auto all = select_candidate_antecedents(s_m, g, wc, 50);
  for (int i = 0; i < n; ++i) CHECK(static_cast<int>(all[i].size()) == i);

  // exhaustive top-K oracle with naive bilinear evaluation
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> scored;
    for (int j = 0; j < i; ++j) {
      double bil = 0.0;
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) bil += g.at(i, r) * wc.at(r, c) * g.at(j, c);
      scored.emplace_back(s_m[i] + s_m[j] + bil, j);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.first > b.first || (a.first == b.first && a.second > b.second);
    });
    std::set<int> expect;
    for (int k = 0; k < std::min<int>(3, scored.size()); ++k) expect.insert(scored[k].second);
    CHECK(std::set<int>(ys[i].begin(), ys[i].end()) == expect);
  }
}

TEST_CASE("gold reachability statistic") {
  Document d = doc_of(6, {0});
  d.gold_clusters = {{Span{0, 0}, Span{2, 2}, Span{4, 4}}, {Span{1, 1}, Span{5, 5}}};
  SpanSet set;
  set.spans = {Span{0, 0}, Span{1, 1}, Span{2, 2}, Span{4, 4}};  // span 5 pruned away
  set.mention_scores = {0, 0, 0, 0};
  set.candidates = {{}, {0}, {1}, {2}};  // span 2's Y misses its antecedent 0
  // anaphoric gold mentions: (2,2), (4,4), (5,5) -> 3
  // reachable: (4,4) via candidate 2; (2,2) has only non-mate 1; (5,5) pruned
  GoldReachability r = gold_reachability(d, set);
  CHECK(r.anaphoric == 3);
  CHECK(r.reachable == 1);
  CHECK(r.fraction() == doctest::Approx(1.0 / 3.0));

  SpanSet reach = set;
  reach.candidates = {{}, {0}, {0, 1}, {1, 2}};
  CHECK(gold_reachability(d, reach).reachable == 2);
}

TEST_CASE("span set debug dump lists spans, scores and candidates") {
  Document d = doc_of(3, {0});
  d.doc_id = "dump_me";
  SpanSet set;
  set.spans = {Span{0, 0}, Span{1, 2}};
  set.mention_scores = {0.5, -1.5};
  set.candidates = {{}, {0}};
  const std::string dump = dump_spanset(d, set);
  CHECK(dump.find("dump_me") != std::string::npos);
  CHECK(dump.find("[1,2]") != std::string::npos);
  CHECK(dump.find("Y={0}") != std::string::npos);
}
