#pragma once

#include <array>
#include <utility>
#include <vector>

#include "coref/document.hpp"
#include "coref/graph.hpp"
#include "coref/optim.hpp"

namespace coref {

struct ScorerConfig {
  int g_dim = 0;    // span representation width
  int hidden = 150;
  int feat_dim = 20;
  int n_genres = 7;
};

inline constexpr int kDistBuckets = 9;

// Buckets over the antecedent gap in retained order:
// {1, 2, 3, 4, [5,8), [8,16), [16,32), [32,64), 64+}.
int distance_bucket(int gap);

void register_scorer_params(ParamStore& params, const ScorerConfig& cfg, Rng& rng);

// Metadata needed by the pair feature function.
struct PairContext {
  const Document* doc = nullptr;
  const std::vector<Span>* spans = nullptr;  // retained spans, document order
};

// Scoring heads over bound parameter leaves. All FFNNs are two ReLU layers
// followed by a linear projection; scores come back as one column per input
// row. The dummy antecedent never enters these builders: s(i, dummy) = 0 by
// convention wherever scores are consumed.
struct Scorer {
  ScorerConfig cfg;
  NodeId m_w1 = 0, m_b1 = 0, m_w2 = 0, m_b2 = 0, m_out = 0;
  NodeId a_w1 = 0, a_b1 = 0, a_w2 = 0, a_b2 = 0, a_out = 0;
  NodeId p_w1 = 0, p_b1 = 0, p_w2 = 0, p_b2 = 0, p_out = 0;
  NodeId feat_speaker = 0, feat_genre = 0, feat_dist = 0;

  static Scorer bind(Graph& g, const ParamStore& params, const ScorerConfig& cfg);

  // s_m for every row of reps (n x g_dim) -> n x 1.
  NodeId mention_scores(Graph& g, NodeId reps) const;

  // φ(i,j) rows: [speaker-match, genre, distance-bucket] embeddings.
  NodeId pair_feature_rows(Graph& g, const PairContext& ctx,
                           const std::vector<std::pair<int, int>>& pairs) const;

  // s_a rows for (i,j) pairs, FFNN over [g_i, g_j, g_i ∘ g_j, φ(i,j)].
  NodeId antecedent_scores(Graph& g, NodeId reps, const PairContext& ctx,
                           const std::vector<std::pair<int, int>>& pairs) const;

  // s(i,j) = s_m(i) + s_m(j) + s_a(i,j) for the same pair list, given the
  // n x 1 mention score column and the pair-aligned s_a column.
  NodeId full_pair_scores(Graph& g, NodeId mention_col, NodeId antecedent_col,
                          const std::vector<std::pair<int, int>>& pairs) const;

  // s_p rows for (i,j,k) triples, FFNN over [g_i, g_j, g_k]; requires
  // j < k < i (the dummy sibling is handled by convention upstream).
  NodeId second_order_scores(Graph& g, NodeId reps,
                             const std::vector<std::array<int, 3>>& triples) const;
};

// Arc-pair score assembly (value level).
// Learned mode: γ s(i,j) + (1-γ) s_p(i,j,k), with s_p(i,j,ζ) = 0.
inline double arc_pair_learned(double s_ij, double s_p_ijk, double gamma) {
  return gamma * s_ij + (1.0 - gamma) * s_p_ijk;
}
// Ablation mode: s(i,j) + s(k,j) + s(i,k); the caller passes 0 for any term
// whose argument is the dummy antecedent or sibling.
inline double arc_pair_ablation(double s_ij, double s_kj, double s_ik) {
  return s_ij + s_kj + s_ik;
}

}  // namespace coref
