#include "coref/gnn.hpp"

#include <algorithm>
#include <numeric>

namespace coref {

WeightMode weight_mode_from_string(const std::string& s) {
  if (s == "soft") return WeightMode::kSoft;
  if (s == "hard1") return WeightMode::kHard1;
  if (s == "topk") return WeightMode::kTopK;
  if (s == "uniform") return WeightMode::kUniform;
  throw CorefError("unknown weight mode: " + s);
}

Neighborhood neighborhood_from_string(const std::string& s) {
  if (s == "antecedents") return Neighborhood::kAntecedents;
  if (s == "bidirectional") return Neighborhood::kBidirectional;
  throw CorefError("unknown neighborhood mode: " + s);
}

std::string to_string(WeightMode m) {
  switch (m) {
    case WeightMode::kSoft: return "soft";
    case WeightMode::kHard1: return "hard1";
    case WeightMode::kTopK: return "topk";
    case WeightMode::kUniform: return "uniform";
  }
  return "?";
}

std::string to_string(Neighborhood n) {
  return n == Neighborhood::kAntecedents ? "antecedents" : "bidirectional";
}

void register_gnn_params(ParamStore& params, int g_dim, Rng& rng) {
  params.add_glorot("gnn.gate.w", 2 * g_dim, g_dim, rng);
  params.add_zeros("gnn.gate.b", 1, g_dim);
}

Gnn Gnn::bind(Graph& g, const ParamStore& params, const GnnConfig& cfg) {
  require(cfg.layers >= 0, "gnn: layers must be nonnegative");
  require(cfg.weight_mode != WeightMode::kTopK || cfg.topk >= 1, "gnn: topk must be >= 1");
  Gnn n;
  n.cfg = cfg;
  n.gate_w = g.leaf(params.value("gnn.gate.w"), true);
  n.gate_b = g.leaf(params.value("gnn.gate.b"), true);
  return n;
}

namespace {

// Per-span forward weights: the node holding one weight per selected
// candidate, the selected candidate span indices, and their positions
// inside Y_i (needed to resolve reverse edges).
struct WeightRow {
  NodeId row = -1;      // 1 x |sel|, unset for hard1/empty
  std::vector<int> sel;       // candidate span indices, ascending
  std::vector<int> sel_pos;   // positions of sel within Y_i
  int hard_pos = -1;          // argmax position for hard1
};

}  // namespace

NodeId Gnn::refine_layer(Graph& g, const Scorer& scorer, const PairContext& ctx,
                         const std::vector<std::vector<int>>& antecedents, NodeId reps,
                         NodeId* agg_out) const {
  const int n = g.value(reps).rows();
  const int gd = g.value(reps).cols();
  require(static_cast<int>(antecedents.size()) == n, "gnn: one candidate set per span");

  std::vector<std::pair<int, int>> pairs;
  std::vector<int> offset(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    for (int j : antecedents[i]) {
      require(j >= 0 && j < i, "gnn: candidate must precede its span");
      pairs.emplace_back(i, j);
    }
    offset[i + 1] = static_cast<int>(pairs.size());
  }

  NodeId full = -1;
  if (cfg.weight_mode != WeightMode::kUniform && !pairs.empty()) {
    NodeId ment = scorer.mention_scores(g, reps);
    NodeId sa = scorer.antecedent_scores(g, reps, ctx, pairs);
    full = scorer.full_pair_scores(g, ment, sa, pairs);
  }

  std::vector<WeightRow> w(n);
  for (int i = 0; i < n; ++i) {
    const auto& cand = antecedents[i];
    const int m = static_cast<int>(cand.size());
    if (m == 0) continue;
    switch (cfg.weight_mode) {
      case WeightMode::kSoft: {
        std::vector<int> rows(m);
        std::iota(rows.begin(), rows.end(), offset[i]);
        w[i].row = g.softmax_rows(g.reshape(g.gather_rows(full, rows), 1, m));
        w[i].sel = cand;
        w[i].sel_pos.resize(m);
        std::iota(w[i].sel_pos.begin(), w[i].sel_pos.end(), 0);
        break;
      }
      case WeightMode::kTopK: {
        std::vector<int> pos(m);
        std::iota(pos.begin(), pos.end(), 0);
        std::sort(pos.begin(), pos.end(), [&](int a, int b) {
          const double sa = g.value(full).at(offset[i] + a, 0);
          const double sb = g.value(full).at(offset[i] + b, 0);
          return sa != sb ? sa > sb : a < b;
        });
        pos.resize(std::min<size_t>(pos.size(), cfg.topk));
        std::sort(pos.begin(), pos.end());
        std::vector<int> rows;
        for (int p : pos) {
          rows.push_back(offset[i] + p);
          w[i].sel.push_back(cand[p]);
        }
        w[i].sel_pos = pos;
        w[i].row = g.softmax_rows(
            g.reshape(g.gather_rows(full, rows), 1, static_cast<int>(rows.size())));
        break;
      }
      case WeightMode::kHard1: {
        int best = 0;
        for (int p = 1; p < m; ++p)
          if (g.value(full).at(offset[i] + p, 0) > g.value(full).at(offset[i] + best, 0))
            best = p;
        w[i].hard_pos = best;
        break;
      }
      case WeightMode::kUniform: {
        w[i].row = g.leaf(Tensor::full(1, m, 1.0 / m), false);
        w[i].sel = cand;
        w[i].sel_pos.resize(m);
        std::iota(w[i].sel_pos.begin(), w[i].sel_pos.end(), 0);
        break;
      }
    }
  }

  // reverse adjacency: (k, position of i inside Y_k) for every i in Y_k
  std::vector<std::vector<std::pair<int, int>>> rev(n);
  if (cfg.neighborhood == Neighborhood::kBidirectional)
    for (int k = 0; k < n; ++k)
      for (int p = 0; p < static_cast<int>(antecedents[k].size()); ++p)
        rev[antecedents[k][p]].emplace_back(k, p);

  NodeId zero_row = -1;
  std::vector<NodeId> agg_rows(n);
  for (int i = 0; i < n; ++i) {
    std::vector<NodeId> terms;
    if (!antecedents[i].empty()) {
      if (cfg.weight_mode == WeightMode::kHard1)
        terms.push_back(g.gather_rows(reps, {antecedents[i][w[i].hard_pos]}));
      else
        terms.push_back(g.matmul(w[i].row, g.gather_rows(reps, w[i].sel)));
    }
    for (const auto& [k, p] : rev[i]) {
      if (cfg.weight_mode == WeightMode::kHard1) {
        if (w[k].hard_pos == p) terms.push_back(g.gather_rows(reps, {k}));
        continue;
      }
      const auto& sp = w[k].sel_pos;
      const auto it = std::find(sp.begin(), sp.end(), p);
      if (it == sp.end()) continue;  // pruned by topk
      const int q = static_cast<int>(it - sp.begin());
      terms.push_back(g.matmul(g.slice_cols(w[k].row, q, 1), g.gather_rows(reps, {k})));
    }
    if (terms.empty()) {
      if (zero_row < 0) zero_row = g.leaf(Tensor(1, gd), false);
      agg_rows[i] = zero_row;
      continue;
    }
    NodeId acc = terms[0];
    for (size_t t = 1; t < terms.size(); ++t) acc = g.add(acc, terms[t]);
    agg_rows[i] = acc;
  }

  NodeId a = g.concat_rows(agg_rows);
  if (agg_out) *agg_out = a;
  NodeId beta = g.sigmoid(g.add(g.matmul(g.concat_cols({reps, a}), gate_w), gate_b));
  NodeId ones = g.leaf(Tensor::full(n, gd, 1.0), false);
  return g.add(g.mul(beta, a), g.mul(g.sub(ones, beta), reps));
}

NodeId Gnn::refine(Graph& g, const Scorer& scorer, const PairContext& ctx,
                   const std::vector<std::vector<int>>& antecedents, NodeId reps) const {
  NodeId v = reps;
  for (int t = 0; t < cfg.layers; ++t) v = refine_layer(g, scorer, ctx, antecedents, v);
  return v;
}

}  // namespace coref
