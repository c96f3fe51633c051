#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "coref/document.hpp"
#include "coref/graph.hpp"
#include "coref/optim.hpp"

namespace coref {

// Fixed (non-trainable) word vectors: either loaded from a text file of
// "word v1 v2 ..." lines, or synthesized deterministically per word from a
// seed. Lookups never fail; unknown words map to the zero vector.
class EmbeddingProvider {
 public:
  static EmbeddingProvider from_file(const std::string& path);
  static EmbeddingProvider synthetic(int dim, uint64_t seed);

  int dim() const { return dim_; }
  std::vector<double> lookup(const std::string& word) const;
  Tensor embed(const Document& doc) const;  // T x dim

 private:
  EmbeddingProvider() = default;
  bool synthetic_ = false;
  uint64_t seed_ = 0;
  int dim_ = 0;
  std::unordered_map<std::string, int> vocab_;
  Tensor vectors_;
};

// Width buckets {1, 2, 3, 4, 5-7, 8+}.
int width_bucket(int width);
inline constexpr int kWidthBuckets = 6;

struct EncoderConfig {
  int d_emb = 16;
  int d_lstm = 24;
  int d_width = 8;

  int state_dim() const { return 2 * d_lstm; }
  int span_dim() const { return 2 * d_lstm + d_emb + d_width; }
};

// Parameter names used by the encoder inside a ParamStore.
void register_encoder_params(ParamStore& params, const EncoderConfig& cfg, Rng& rng);

// Graph-side encoder over already-bound parameter leaves.
struct Encoder {
  EncoderConfig cfg;
  NodeId fw_w = 0, fw_b = 0, bw_w = 0, bw_b = 0;  // LSTM weights per direction
  NodeId att_w = 0;                               // 2*d_lstm x 1 head-attention projection
  NodeId width_table = 0;                         // kWidthBuckets x d_width

  static Encoder bind(Graph& g, const ParamStore& params, const EncoderConfig& cfg);

  // Contextual states (T x 2*d_lstm). Both directions run within each
  // sentence and restart from zero at sentence starts; columns [0, d_lstm)
  // hold the forward state, [d_lstm, 2*d_lstm) the backward state.
  NodeId encode(Graph& g, NodeId emb, const std::vector<int>& sentence_starts) const;

  // One row per span: [backward state at start, forward state at end,
  // attention-weighted sum of the span's word vectors, width embedding].
  // When att_out is given it receives one softmax node per span.
  NodeId span_reps(Graph& g, NodeId states, NodeId emb, const std::vector<Span>& spans,
                   std::vector<NodeId>* att_out = nullptr) const;
};

}  // namespace coref
