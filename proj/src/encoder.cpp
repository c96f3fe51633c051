#include "coref/encoder.hpp"

#include <fstream>
#include <sstream>

#include "coref/rng.hpp"

namespace coref {

EmbeddingProvider EmbeddingProvider::from_file(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "embeddings: cannot open: " + path);
  EmbeddingProvider p;
  std::vector<double> flat;
  std::string line;
  int row = 0;
  while (std::getline(f, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    require(ss.eof(), "embeddings: non-numeric value on line for: " + word);
    require(!vals.empty(), "embeddings: no values for: " + word);
    if (p.dim_ == 0) p.dim_ = static_cast<int>(vals.size());
    require(static_cast<int>(vals.size()) == p.dim_, "embeddings: ragged dimensions at: " + word);
    require(p.vocab_.emplace(word, row).second, "embeddings: duplicate word: " + word);
    flat.insert(flat.end(), vals.begin(), vals.end());
    ++row;
  }
  require(row > 0, "embeddings: empty file: " + path);
  p.vectors_ = Tensor::matrix(row, p.dim_, std::move(flat));
  require(p.vectors_.all_finite(), "embeddings: non-finite value in: " + path);
  return p;
}

EmbeddingProvider EmbeddingProvider::synthetic(int dim, uint64_t seed) {
  require(dim > 0, "embeddings: dimension must be positive");
  EmbeddingProvider p;
  p.synthetic_ = true;
  p.dim_ = dim;
  p.seed_ = seed;
  return p;
}

std::vector<double> EmbeddingProvider::lookup(const std::string& word) const {
  if (synthetic_) {
    Rng rng(seed_ ^ fnv1a64(word));
    std::vector<double> v(dim_);
    for (double& x : v) x = rng.uniform(-0.5, 0.5);
    return v;
  }
  auto it = vocab_.find(word);
  if (it == vocab_.end()) return std::vector<double>(dim_, 0.0);
  const double* row = vectors_.data.data() + static_cast<size_t>(it->second) * dim_;
  return std::vector<double>(row, row + dim_);
}

Tensor EmbeddingProvider::embed(const Document& doc) const {
  Tensor out(static_cast<int>(doc.tokens.size()), dim_);
  for (size_t t = 0; t < doc.tokens.size(); ++t) {
    const std::vector<double> v = lookup(doc.tokens[t]);
    std::copy(v.begin(), v.end(), out.data.begin() + t * dim_);
  }
  return out;
}

int width_bucket(int width) {
  if (width <= 1) return 0;
  if (width <= 4) return width - 1;
  if (width <= 7) return 4;
  return 5;
}

void register_encoder_params(ParamStore& params, const EncoderConfig& cfg, Rng& rng) {
  const int in = cfg.d_emb + cfg.d_lstm;
  params.add_glorot("enc.fw.w", in, 4 * cfg.d_lstm, rng);
  params.add_zeros("enc.fw.b", 1, 4 * cfg.d_lstm);
  params.add_glorot("enc.bw.w", in, 4 * cfg.d_lstm, rng);
  params.add_zeros("enc.bw.b", 1, 4 * cfg.d_lstm);
  params.add_glorot("enc.att.w", 2 * cfg.d_lstm, 1, rng);
  params.add_glorot("enc.width.emb", kWidthBuckets, cfg.d_width, rng);
}

Encoder Encoder::bind(Graph& g, const ParamStore& params, const EncoderConfig& cfg) {
  Encoder e;
  e.cfg = cfg;
  e.fw_w = g.leaf(params.value("enc.fw.w"), true);
  e.fw_b = g.leaf(params.value("enc.fw.b"), true);
  e.bw_w = g.leaf(params.value("enc.bw.w"), true);
  e.bw_b = g.leaf(params.value("enc.bw.b"), true);
  e.att_w = g.leaf(params.value("enc.att.w"), true);
  e.width_table = g.leaf(params.value("enc.width.emb"), true);
  return e;
}

namespace {

// One LSTM step; gate layout along the 4*d preactivation is [i, f, o, g].
struct LstmState {
  NodeId h, c;
};

LstmState lstm_step(Graph& g, NodeId x, LstmState s, NodeId w, NodeId b, int d) {
  NodeId pre = g.add(g.matmul(g.concat_cols({x, s.h}), w), b);
  NodeId i = g.sigmoid(g.slice_cols(pre, 0, d));
  NodeId f = g.sigmoid(g.slice_cols(pre, d, d));
  NodeId o = g.sigmoid(g.slice_cols(pre, 2 * d, d));
  NodeId cand = g.tanh(g.slice_cols(pre, 3 * d, d));
  NodeId c = g.add(g.mul(f, s.c), g.mul(i, cand));
  NodeId h = g.mul(o, g.tanh(c));
  return {h, c};
}

}  // namespace

NodeId Encoder::encode(Graph& g, NodeId emb, const std::vector<int>& sentence_starts) const {
  const int T = g.value(emb).rows();
  require(T > 0, "encoder: empty document");
  const int d = cfg.d_lstm;

  std::vector<int> starts = sentence_starts;
  if (starts.empty()) starts = {0};
  std::vector<NodeId> fw(T), bw(T);
  const NodeId zero = g.leaf(Tensor(1, d), false);

  for (size_t s = 0; s < starts.size(); ++s) {
    const int lo = starts[s];
    const int hi = (s + 1 < starts.size() ? starts[s + 1] : T) - 1;
    LstmState fs{zero, zero};
    for (int t = lo; t <= hi; ++t) {
      fs = lstm_step(g, g.gather_rows(emb, {t}), fs, fw_w, fw_b, d);
      fw[t] = fs.h;
    }
    LstmState bs{zero, zero};
    for (int t = hi; t >= lo; --t) {
      bs = lstm_step(g, g.gather_rows(emb, {t}), bs, bw_w, bw_b, d);
      bw[t] = bs.h;
    }
  }

  std::vector<NodeId> rows(T);
  for (int t = 0; t < T; ++t) rows[t] = g.concat_cols({fw[t], bw[t]});
  return g.concat_rows(rows);
}

NodeId Encoder::span_reps(Graph& g, NodeId states, NodeId emb, const std::vector<Span>& spans,
                          std::vector<NodeId>* att_out) const {
  require(!spans.empty(), "encoder: no spans");
  const int d = cfg.d_lstm;
  const NodeId scores = g.matmul(states, att_w);  // T x 1

  std::vector<NodeId> rows;
  rows.reserve(spans.size());
  for (const Span& sp : spans) {
    std::vector<int> idx(sp.width());
    for (int k = 0; k < sp.width(); ++k) idx[k] = sp.start + k;
    NodeId logits = g.reshape(g.gather_rows(scores, idx), 1, sp.width());
    NodeId att = g.softmax_rows(logits);
    if (att_out) att_out->push_back(att);
    NodeId head = g.matmul(att, g.gather_rows(emb, idx));  // 1 x d_emb

    NodeId x_start = g.slice_cols(g.gather_rows(states, {sp.start}), d, d);
    NodeId x_end = g.slice_cols(g.gather_rows(states, {sp.end}), 0, d);
    NodeId width = g.gather_rows(width_table, {width_bucket(sp.width())});
    rows.push_back(g.concat_cols({x_start, x_end, head, width}));
  }
  return g.concat_rows(rows);
}

}  // namespace coref
