#include "coref/model.hpp"

#include <array>
#include <memory>
#include <unordered_map>

namespace coref {

DecodeMode decode_mode_from_string(const std::string& s) {
  if (s == "greedy") return DecodeMode::kGreedy;
  if (s == "second-order") return DecodeMode::kSecondOrder;
  throw CorefError("unknown decode mode: " + s);
}

ArcMode arc_mode_from_string(const std::string& s) {
  if (s == "learned") return ArcMode::kLearned;
  if (s == "ablation") return ArcMode::kAblation;
  throw CorefError("unknown arc mode: " + s);
}

std::string to_string(DecodeMode m) {
  return m == DecodeMode::kGreedy ? "greedy" : "second-order";
}

std::string to_string(ArcMode m) { return m == ArcMode::kLearned ? "learned" : "ablation"; }

ScorerConfig ModelConfig::scorer() const {
  ScorerConfig s;
  s.g_dim = enc.span_dim();
  s.hidden = hidden;
  s.feat_dim = feat_dim;
  s.n_genres = genre_count();
  return s;
}

void register_model_params(ParamStore& params, const ModelConfig& cfg, Rng& rng) {
  register_encoder_params(params, cfg.enc, rng);
  register_scorer_params(params, cfg.scorer(), rng);
  register_gnn_params(params, cfg.enc.span_dim(), rng);
}

void flatten_pairs(const std::vector<std::vector<int>>& cand,
                   std::vector<std::pair<int, int>>& pairs, std::vector<int>& offsets) {
  pairs.clear();
  offsets.assign(1, 0);
  for (size_t i = 0; i < cand.size(); ++i) {
    for (int j : cand[i]) pairs.emplace_back(static_cast<int>(i), j);
    offsets.push_back(static_cast<int>(pairs.size()));
  }
}

CorefModel CorefModel::bind(Graph& g, const ParamStore& params, const ModelConfig& cfg) {
  CorefModel m;
  m.cfg = cfg;
  m.enc = Encoder::bind(g, params, cfg.enc);
  m.scorer = Scorer::bind(g, params, cfg.scorer());
  m.gnn = Gnn::bind(g, params, cfg.gnn);
  m.coarse_w = params.value("scr.coarse.w");
  m.param_nodes = {
      {"enc.fw.w", m.enc.fw_w},          {"enc.fw.b", m.enc.fw_b},
      {"enc.bw.w", m.enc.bw_w},          {"enc.bw.b", m.enc.bw_b},
      {"enc.att.w", m.enc.att_w},        {"enc.width.emb", m.enc.width_table},
      {"scr.m.w1", m.scorer.m_w1},       {"scr.m.b1", m.scorer.m_b1},
      {"scr.m.w2", m.scorer.m_w2},       {"scr.m.b2", m.scorer.m_b2},
      {"scr.m.out", m.scorer.m_out},     {"scr.a.w1", m.scorer.a_w1},
      {"scr.a.b1", m.scorer.a_b1},       {"scr.a.w2", m.scorer.a_w2},
      {"scr.a.b2", m.scorer.a_b2},       {"scr.a.out", m.scorer.a_out},
      {"scr.p.w1", m.scorer.p_w1},       {"scr.p.b1", m.scorer.p_b1},
      {"scr.p.w2", m.scorer.p_w2},       {"scr.p.b2", m.scorer.p_b2},
      {"scr.p.out", m.scorer.p_out},     {"scr.feat.speaker", m.scorer.feat_speaker},
      {"scr.feat.genre", m.scorer.feat_genre}, {"scr.feat.dist", m.scorer.feat_dist},
      {"gnn.gate.w", m.gnn.gate_w},      {"gnn.gate.b", m.gnn.gate_b},
  };
  return m;
}

DocForward CorefModel::forward(Graph& g, const EmbeddingProvider& emb,
                               const Document& doc) const {
  DocForward f;
  f.doc = &doc;
  f.offsets.assign(1, 0);
  const std::vector<Span> all = enumerate_spans(doc, cfg.cand.max_width);
  if (all.empty()) return f;

  NodeId x = g.leaf(emb.embed(doc));
  NodeId states = enc.encode(g, x, doc.sentence_starts);
  NodeId reps_all = enc.span_reps(g, states, x, all);
  NodeId ment_all = scorer.mention_scores(g, reps_all);

  std::vector<double> sm(all.size());
  const Tensor& mv = g.value(ment_all);
  for (size_t s = 0; s < all.size(); ++s) sm[s] = mv.at(static_cast<int>(s), 0);
  const std::vector<int> keep =
      prune_mentions(all, sm, cfg.cand.spans_ratio, static_cast<int>(doc.tokens.size()));

  f.set.spans.reserve(keep.size());
  f.set.mention_scores.reserve(keep.size());
  for (int s : keep) {
    f.set.spans.push_back(all[s]);
    f.set.mention_scores.push_back(sm[s]);
  }
  NodeId reps0 = g.gather_rows(reps_all, keep);
  NodeId ment0 = g.gather_rows(ment_all, keep);
  f.set.candidates =
      select_candidate_antecedents(f.set.mention_scores, g.value(reps0), coarse_w, cfg.cand.top_k);

  PairContext ctx{&doc, &f.set.spans};
  f.reps = gnn.refine(g, scorer, ctx, f.set.candidates, reps0);
  f.mention = cfg.gnn.layers == 0 ? ment0 : scorer.mention_scores(g, f.reps);

  flatten_pairs(f.set.candidates, f.pairs, f.offsets);
  if (!f.pairs.empty()) {
    NodeId sa = scorer.antecedent_scores(g, f.reps, ctx, f.pairs);
    f.scores = scorer.full_pair_scores(g, f.mention, sa, f.pairs);
  }
  return f;
}

ScoreTable CorefModel::score_table(Graph& g, const DocForward& fwd) const {
  const int n = fwd.n_spans();
  ScoreTable t;
  t.n = n;
  t.mode = cfg.arc_mode;
  t.gamma = cfg.gamma;
  t.cand = fwd.set.candidates;
  t.first = Tensor(n, n);
  if (n > 1) {
    std::vector<std::pair<int, int>> dense;
    dense.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j) dense.emplace_back(i, j);
    PairContext ctx{fwd.doc, &fwd.set.spans};
    NodeId sa = scorer.antecedent_scores(g, fwd.reps, ctx, dense);
    NodeId sc = scorer.full_pair_scores(g, fwd.mention, sa, dense);
    const Tensor& v = g.value(sc);
    for (size_t p = 0; p < dense.size(); ++p)
      t.first.at(dense[p].first, dense[p].second) = v.at(static_cast<int>(p), 0);
  }
  if (cfg.arc_mode == ArcMode::kLearned && cfg.gamma < 1.0 && n > 2) {
    std::vector<std::array<int, 3>> triples;
    for (int i = 0; i < n; ++i)
      for (int j : fwd.set.candidates[i])
        for (int k = j + 1; k < i; ++k) triples.push_back({i, j, k});
    auto vals = std::make_shared<std::unordered_map<long long, double>>();
    if (!triples.empty()) {
      NodeId sp = scorer.second_order_scores(g, fwd.reps, triples);
      const Tensor& v = g.value(sp);
      for (size_t q = 0; q < triples.size(); ++q) {
        const auto& tr = triples[q];
        (*vals)[(static_cast<long long>(tr[0]) * n + tr[1]) * n + tr[2]] =
            v.at(static_cast<int>(q), 0);
      }
    }
    t.second = [vals, n](int i, int j, int k) {
      auto it = vals->find((static_cast<long long>(i) * n + j) * n + k);
      require(it != vals->end(), "score_table: unscored sibling triple");
      return it->second;
    };
  }
  t.finalize();
  return t;
}

AntecedentTree decode_tree(const ScoreTable& t, DecodeMode mode) {
  if (mode == DecodeMode::kGreedy) return greedy_decode(t);
  return hill_climb(t, eisner_second_order(t));
}

std::vector<Cluster> predict_clusters(const ParamStore& params, const ModelConfig& cfg,
                                      const EmbeddingProvider& emb, const Document& doc,
                                      AntecedentTree* tree_out, SpanSet* set_out) {
  Graph g;
  CorefModel model = CorefModel::bind(g, params, cfg);
  DocForward fwd = model.forward(g, emb, doc);
  std::vector<Cluster> out;
  AntecedentTree tree;
  if (fwd.n_spans() > 0) {
    ScoreTable t = model.score_table(g, fwd);
    tree = decode_tree(t, cfg.decode);
    for (const auto& comp : clusters_from_tree(tree)) {
      Cluster c;
      c.reserve(comp.size());
      for (int i : comp) c.push_back(fwd.set.spans[i]);
      out.push_back(std::move(c));
    }
  }
  if (tree_out) *tree_out = std::move(tree);
  if (set_out) *set_out = std::move(fwd.set);
  return out;
}

}  // namespace coref
