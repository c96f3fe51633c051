#include "coref/scorer.hpp"

namespace coref {

int distance_bucket(int gap) {
  require(gap >= 1, "distance_bucket: gap must be >= 1");
  if (gap <= 4) return gap - 1;
  if (gap < 8) return 4;
  if (gap < 16) return 5;
  if (gap < 32) return 6;
  if (gap < 64) return 7;
  return 8;
}

namespace {

void register_ffnn(ParamStore& params, const std::string& prefix, int in, int hidden, Rng& rng) {
  params.add_glorot(prefix + ".w1", in, hidden, rng);
  params.add_zeros(prefix + ".b1", 1, hidden);
  params.add_glorot(prefix + ".w2", hidden, hidden, rng);
  params.add_zeros(prefix + ".b2", 1, hidden);
  params.add_glorot(prefix + ".out", hidden, 1, rng);
}

NodeId ffnn(Graph& g, NodeId x, NodeId w1, NodeId b1, NodeId w2, NodeId b2, NodeId out) {
  NodeId h1 = g.relu(g.add(g.matmul(x, w1), b1));
  NodeId h2 = g.relu(g.add(g.matmul(h1, w2), b2));
  return g.matmul(h2, out);
}

}  // namespace

void register_scorer_params(ParamStore& params, const ScorerConfig& cfg, Rng& rng) {
  require(cfg.g_dim > 0, "scorer: g_dim must be set");
  register_ffnn(params, "scr.m", cfg.g_dim, cfg.hidden, rng);
  register_ffnn(params, "scr.a", 3 * cfg.g_dim + 3 * cfg.feat_dim, cfg.hidden, rng);
  register_ffnn(params, "scr.p", 3 * cfg.g_dim, cfg.hidden, rng);
  params.add_glorot("scr.coarse.w", cfg.g_dim, cfg.g_dim, rng);
  params.add_glorot("scr.feat.speaker", 2, cfg.feat_dim, rng);
  params.add_glorot("scr.feat.genre", cfg.n_genres, cfg.feat_dim, rng);
  params.add_glorot("scr.feat.dist", kDistBuckets, cfg.feat_dim, rng);
}

Scorer Scorer::bind(Graph& g, const ParamStore& params, const ScorerConfig& cfg) {
  Scorer s;
  s.cfg = cfg;
  auto leaf = [&](const std::string& name) { return g.leaf(params.value(name), true); };
  s.m_w1 = leaf("scr.m.w1");
  s.m_b1 = leaf("scr.m.b1");
  s.m_w2 = leaf("scr.m.w2");
  s.m_b2 = leaf("scr.m.b2");
  s.m_out = leaf("scr.m.out");
  s.a_w1 = leaf("scr.a.w1");
  s.a_b1 = leaf("scr.a.b1");
  s.a_w2 = leaf("scr.a.w2");
  s.a_b2 = leaf("scr.a.b2");
  s.a_out = leaf("scr.a.out");
  s.p_w1 = leaf("scr.p.w1");
  s.p_b1 = leaf("scr.p.b1");
  s.p_w2 = leaf("scr.p.w2");
  s.p_b2 = leaf("scr.p.b2");
  s.p_out = leaf("scr.p.out");
  s.feat_speaker = leaf("scr.feat.speaker");
  s.feat_genre = leaf("scr.feat.genre");
  s.feat_dist = leaf("scr.feat.dist");
  return s;
}

NodeId Scorer::mention_scores(Graph& g, NodeId reps) const {
  return ffnn(g, reps, m_w1, m_b1, m_w2, m_b2, m_out);
}

NodeId Scorer::pair_feature_rows(Graph& g, const PairContext& ctx,
                                 const std::vector<std::pair<int, int>>& pairs) const {
  require(ctx.doc && ctx.spans, "pair features: context not set");
  require(ctx.doc->genre >= 0 && ctx.doc->genre < cfg.n_genres,
          "pair features: genre out of range");
  std::vector<int> spk, gen, dst;
  spk.reserve(pairs.size());
  gen.reserve(pairs.size());
  dst.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    require(j < i, "pair features: antecedent must precede");
    const Span& si = (*ctx.spans)[i];
    const Span& sj = (*ctx.spans)[j];
    const bool same = ctx.doc->speakers[si.start] == ctx.doc->speakers[sj.start];
    spk.push_back(same ? 1 : 0);
    gen.push_back(ctx.doc->genre);
    dst.push_back(distance_bucket(i - j));
  }
  return g.concat_cols({g.gather_rows(feat_speaker, spk), g.gather_rows(feat_genre, gen),
                        g.gather_rows(feat_dist, dst)});
}

NodeId Scorer::antecedent_scores(Graph& g, NodeId reps, const PairContext& ctx,
                                 const std::vector<std::pair<int, int>>& pairs) const {
  require(!pairs.empty(), "antecedent scores: no pairs");
  std::vector<int> is, js;
  is.reserve(pairs.size());
  js.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    is.push_back(i);
    js.push_back(j);
  }
  NodeId gi = g.gather_rows(reps, is);
  NodeId gj = g.gather_rows(reps, js);
  NodeId phi = pair_feature_rows(g, ctx, pairs);
  NodeId x = g.concat_cols({gi, gj, g.mul(gi, gj), phi});
  return ffnn(g, x, a_w1, a_b1, a_w2, a_b2, a_out);
}

NodeId Scorer::full_pair_scores(Graph& g, NodeId mention_col, NodeId antecedent_col,
                                const std::vector<std::pair<int, int>>& pairs) const {
  std::vector<int> is, js;
  is.reserve(pairs.size());
  js.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    is.push_back(i);
    js.push_back(j);
  }
  return g.add(g.add(g.gather_rows(mention_col, is), g.gather_rows(mention_col, js)),
               antecedent_col);
}

NodeId Scorer::second_order_scores(Graph& g, NodeId reps,
                                   const std::vector<std::array<int, 3>>& triples) const {
  require(!triples.empty(), "second-order scores: no triples");
  std::vector<int> is, js, ks;
  is.reserve(triples.size());
  js.reserve(triples.size());
  ks.reserve(triples.size());
  for (const auto& t : triples) {
    require(t[1] < t[2] && t[2] < t[0], "second-order scores: sibling must lie between");
    is.push_back(t[0]);
    js.push_back(t[1]);
    ks.push_back(t[2]);
  }
  NodeId x = g.concat_cols(
      {g.gather_rows(reps, is), g.gather_rows(reps, js), g.gather_rows(reps, ks)});
  return ffnn(g, x, p_w1, p_b1, p_w2, p_b2, p_out);
}

}  // namespace coref
