#pragma once

#include <string>
#include <vector>

#include "coref/graph.hpp"
#include "coref/optim.hpp"
#include "coref/scorer.hpp"

namespace coref {

enum class WeightMode { kSoft, kHard1, kTopK, kUniform };
enum class Neighborhood { kAntecedents, kBidirectional };

WeightMode weight_mode_from_string(const std::string& s);
Neighborhood neighborhood_from_string(const std::string& s);
std::string to_string(WeightMode m);
std::string to_string(Neighborhood n);

struct GnnConfig {
  int layers = 1;
  WeightMode weight_mode = WeightMode::kSoft;
  int topk = 3;
  Neighborhood neighborhood = Neighborhood::kAntecedents;
};

// Gate parameters: gnn.gate.w maps [v, a] (2g wide) to g logits, plus a
// zero-initialized bias.
void register_gnn_params(ParamStore& params, int g_dim, Rng& rng);

// Gated refinement over the antecedent candidate graph. Edge weights are
// recomputed each layer from the shared first-order scorer applied to the
// incoming representations; pair features depend on span metadata only and
// stay fixed across layers. The dummy antecedent has no representation and
// never enters a neighborhood; spans with no candidates aggregate the zero
// vector.
struct Gnn {
  GnnConfig cfg;
  NodeId gate_w = 0, gate_b = 0;

  static Gnn bind(Graph& g, const ParamStore& params, const GnnConfig& cfg);

  // One step v^t -> v^{t+1}: a_i = Σ_{j∈N(i)} α_ij v_j, then
  // v' = β ∘ a + (1-β) ∘ v with β = σ([v, a] W_f + b_f).
  // Weight modes: soft = softmax over Y_i of s(i,j); hard1 = the argmax
  // neighbor's vector (selection treated as constant, gradient flows only
  // through the chosen row); topk = softmax renormalized over the k best;
  // uniform = 1/|Y_i|. Bidirectional adds reverse edges k -> i for i ∈ Y_k,
  // reusing α_ki. Optionally exposes the aggregate node via agg_out.
  NodeId refine_layer(Graph& g, const Scorer& scorer, const PairContext& ctx,
                      const std::vector<std::vector<int>>& antecedents, NodeId reps,
                      NodeId* agg_out = nullptr) const;

  // cfg.layers applications; zero layers returns reps itself.
  NodeId refine(Graph& g, const Scorer& scorer, const PairContext& ctx,
                const std::vector<std::vector<int>>& antecedents, NodeId reps) const;
};

}  // namespace coref
