#pragma once

#include <string>
#include <utility>
#include <vector>

#include "coref/candidates.hpp"
#include "coref/decoder.hpp"
#include "coref/document.hpp"
#include "coref/encoder.hpp"
#include "coref/gnn.hpp"
#include "coref/graph.hpp"
#include "coref/scorer.hpp"

namespace coref {

enum class DecodeMode { kGreedy, kSecondOrder };
DecodeMode decode_mode_from_string(const std::string& s);
ArcMode arc_mode_from_string(const std::string& s);
std::string to_string(DecodeMode m);
std::string to_string(ArcMode m);

struct ModelConfig {
  EncoderConfig enc;
  CandidateConfig cand;
  GnnConfig gnn;
  int hidden = 150;    // scorer FFNN width
  int feat_dim = 20;   // speaker/genre/distance feature width
  double gamma = 0.8;  // arc-pair mix: γ s(i,j) + (1-γ) s_p(i,j,k)
  ArcMode arc_mode = ArcMode::kLearned;
  DecodeMode decode = DecodeMode::kSecondOrder;

  ScorerConfig scorer() const;
};

// Registers encoder, scorer and gate parameters in one fixed order, so a
// seed pins the full initial state no matter which flags are active.
void register_model_params(ParamStore& params, const ModelConfig& cfg, Rng& rng);

// Candidate pairs flattened in span order: pairs[offsets[i] .. offsets[i+1])
// are (i, j) for j in cand[i], j ascending.
void flatten_pairs(const std::vector<std::vector<int>>& cand,
                   std::vector<std::pair<int, int>>& pairs, std::vector<int>& offsets);

// One document pushed through span enumeration, mention pruning, coarse
// candidate selection, GNN refinement and final first-order scoring.
struct DocForward {
  const Document* doc = nullptr;
  SpanSet set;
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> offsets;  // |spans|+1 prefix bounds into pairs
  NodeId reps = -1;          // refined representations, |spans| x g_dim
  NodeId mention = -1;       // final s_m column, |spans| x 1
  NodeId scores = -1;        // final s(i,j) column, |pairs| x 1; -1 if no pairs

  int n_spans() const { return static_cast<int>(set.spans.size()); }
};

struct CorefModel {
  ModelConfig cfg;
  Encoder enc;
  Scorer scorer;
  Gnn gnn;
  Tensor coarse_w;  // bilinear pruning factor; pruning-only, never trained
  std::vector<std::pair<std::string, NodeId>> param_nodes;  // trainable leaves

  static CorefModel bind(Graph& g, const ParamStore& params, const ModelConfig& cfg);

  DocForward forward(Graph& g, const EmbeddingProvider& emb, const Document& doc) const;

  // Value-level decode scores: dense first order over every retained pair
  // (sibling terms in ablation mode reach beyond candidate sets), plus the
  // candidate-triple second order in one batched FFNN call when learned.
  ScoreTable score_table(Graph& g, const DocForward& fwd) const;
};

AntecedentTree decode_tree(const ScoreTable& t, DecodeMode mode);

// Fresh-graph end-to-end prediction; clusters come back as token spans.
std::vector<Cluster> predict_clusters(const ParamStore& params, const ModelConfig& cfg,
                                      const EmbeddingProvider& emb, const Document& doc,
                                      AntecedentTree* tree_out = nullptr,
                                      SpanSet* set_out = nullptr);

}  // namespace coref
