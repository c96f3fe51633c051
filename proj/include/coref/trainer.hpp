#pragma once

#include <string>
#include <vector>

#include "coref/document.hpp"
#include "coref/metrics.hpp"
#include "coref/model.hpp"
#include "coref/optim.hpp"

namespace coref {

// A non-finite value, gradient or loss surfaced during a training step.
struct DivergenceError : CorefError {
  using CorefError::CorefError;
};

struct TrainConfig {
  int epochs = 20;
  double lr = 1e-3;
  double decay = 1.0;     // multiplicative per-epoch learning-rate factor
  double clip = 5.0;      // global gradient-norm bound
  double lambda = 0.001;  // sibling-loss weight
  int sib_cap = 30;       // nearest candidate siblings kept per (i,j); < 0 keeps all
  uint64_t seed = 1;      // recorded in the log; parameter init happens upstream
  double stop_at_f1 = -1.0;  // stop once train Avg F1 reaches this (< 0: never)
};

// K_{i,j}: the dummy sibling first, then retained spans strictly between j
// and i, capped to the `cap` nearest to i.
std::vector<int> candidate_siblings(int i, int j, int cap);

// Gold cluster id per retained span by exact span match; -1 for spans that
// are not gold mentions.
std::vector<int> gold_cluster_ids(const Document& doc, const std::vector<Span>& spans);

// Marginal log-likelihood over gold antecedents: per span, log of the summed
// softmax mass on GOLD(i), the softmax running over Y_i ∪ {ε} with the dummy
// pinned at score 0. Returns -1 when the document has no candidate pairs
// (every per-span term is the constant 0).
NodeId loss_base_node(Graph& g, const DocForward& fwd, const GoldAnnotation& gold);

// Sibling marginal log-likelihood: joint softmax over (j' ∈ Y_i,
// k' ∈ K_{i,j'}) plus the (ε, ζ) pair pinned at score 0; the numerator sums
// gold antecedents ĵ paired with their gold siblings (cluster mates of i
// inside K_{i,ĵ}, ζ when there are none). Spans with GOLD(i) = {ε}
// contribute nothing. Returns -1 when no span contributes. Requires the
// learned arc-pair mode.
NodeId loss_sibling_node(Graph& g, const CorefModel& model, const DocForward& fwd,
                         const GoldAnnotation& gold, int sib_cap);

// L = -L_base - λ L_sib; a -1 piece counts as 0. Returns -1 when both are.
NodeId total_loss_node(Graph& g, NodeId l_base, NodeId l_sib, double lambda);

// Decode every document and aggregate metrics against its gold clusters.
CorpusMetrics evaluate_corpus(const ParamStore& params, const ModelConfig& cfg,
                              const EmbeddingProvider& emb, const std::vector<Document>& docs);

struct TrainResult {
  std::vector<std::string> epoch_log;  // one JSON object per epoch
  double train_loss = 0.0;             // mean per-document loss, last epoch
  double train_avg_f1 = 0.0;           // last epoch
  double dev_avg_f1 = 0.0;             // last epoch; 0 with no dev docs
};

// Adam over per-document steps in fixed corpus order; deterministic given
// the initial parameters. Documents with no retained spans or no candidate
// pairs are skipped; any non-finite value, gradient or loss throws a
// DivergenceError naming the document.
TrainResult train_model(ParamStore& params, const ModelConfig& mcfg, const TrainConfig& tcfg,
                        const EmbeddingProvider& emb, const std::vector<Document>& train_docs,
                        const std::vector<Document>& dev_docs);

}  // namespace coref
