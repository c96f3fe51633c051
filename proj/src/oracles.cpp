#include "coref/oracles.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <sstream>

#include "coref/decoder.hpp"
#include "coref/fd.hpp"
#include "coref/rng.hpp"
#include "coref/trainer.hpp"

namespace coref {
namespace {

constexpr size_t kMaxNotes = 5;

void note_failure(SuiteReport& r, const std::string& dump) {
  ++r.failures;
  if (r.notes.size() < kMaxNotes) r.notes.push_back(dump);
}

// ---- decoder suite ----

ScoreTable random_decode_table(Rng& rng, int max_n, double gamma) {
  ScoreTable t;
  const int n = rng.uniform_int(1, max_n);
  t.n = n;
  t.mode = ArcMode::kLearned;
  t.gamma = gamma;
  t.first = Tensor::zeros(n, n);
  t.cand.assign(n, {});
  auto sp = std::make_shared<std::map<long long, double>>();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      t.first.at(i, j) = rng.uniform(-2.0, 2.0);
      for (int k = j + 1; k < i; ++k)
        (*sp)[(static_cast<long long>(i) * n + j) * n + k] = rng.uniform(-2.0, 2.0);
      if (rng.bernoulli(0.7)) t.cand[i].push_back(j);
    }
  t.second = [sp, n](int i, int j, int k) {
    return sp->at((static_cast<long long>(i) * n + j) * n + k);
  };
  t.finalize();
  return t;
}

// position space: 0 is eps, span i sits at i+1; two arcs must not interleave
bool projective(const std::vector<int>& head) {
  const int n = static_cast<int>(head.size());
  for (int m1 = 1; m1 <= n; ++m1)
    for (int m2 = 1; m2 <= n; ++m2) {
      const int h1 = head[m1 - 1] + 1, h2 = head[m2 - 1] + 1;
      if (h1 < h2 && h2 < m1 && m1 < m2) return false;
    }
  return true;
}

void enumerate_heads(const ScoreTable& t, int i, std::vector<int>& head,
                     const std::function<void(const std::vector<int>&)>& visit) {
  if (i == t.n) {
    visit(head);
    return;
  }
  head[i] = kEps;
  enumerate_heads(t, i + 1, head, visit);
  for (int j : t.cand[i]) {
    head[i] = j;
    enumerate_heads(t, i + 1, head, visit);
  }
  head[i] = kEps;
}

std::string dump_decode_instance(const ScoreTable& t, const std::string& label,
                                 const std::string& why) {
  std::ostringstream os;
  os.precision(17);
  os << label << ": " << why << " [n=" << t.n << " gamma=" << t.gamma << "]\n";
  for (int i = 0; i < t.n; ++i) {
    os << "  span " << i << " Y={";
    for (size_t c = 0; c < t.cand[i].size(); ++c) os << (c ? "," : "") << t.cand[i][c];
    os << "} s=";
    for (int j = 0; j < i; ++j) os << (j ? "," : "") << t.first.at(i, j);
    os << "\n";
  }
  return os.str();
}

// ---- gradient suite ----

Document random_gradient_doc(Rng& rng) {
  static const std::vector<std::string> vocab = {"ann", "bo",  "cat", "dig", "elm",
                                                 "fox", "gus", "hum", "ivy", "jot"};
  Document doc;
  const int n_tok = rng.uniform_int(5, 8);
  doc.doc_id = "fdcase";
  doc.sentence_starts = {0};
  for (int t = 0; t < n_tok; ++t) {
    doc.tokens.push_back(vocab[rng.uniform_int(0, static_cast<int>(vocab.size()) - 1)]);
    if (t > 0 && rng.bernoulli(0.25)) doc.sentence_starts.push_back(t);
    doc.speakers.push_back(doc.sentence_starts.size() % 2 ? "spk0" : "spk1");
  }
  doc.genre = rng.uniform_int(0, genre_count() - 1);
  std::vector<int> pos(n_tok);
  for (int t = 0; t < n_tok; ++t) pos[t] = t;
  for (int t = n_tok - 1; t > 0; --t) std::swap(pos[t], pos[rng.uniform_int(0, t)]);
  std::vector<Cluster> clusters = {{Span{pos[0], pos[0]}, Span{pos[1], pos[1]}},
                                   {Span{pos[2], pos[2]}, Span{pos[3], pos[3]}}};
  doc.gold_clusters = canonicalize_clusters(std::move(clusters), n_tok, 2);
  return doc;
}

ModelConfig gradient_config(int idx) {
  ModelConfig cfg;
  cfg.enc.d_emb = 3;
  cfg.enc.d_lstm = 2;
  cfg.enc.d_width = 2;
  cfg.cand.max_width = 2;
  cfg.cand.spans_ratio = 3.0;
  cfg.cand.top_k = 10;
  cfg.hidden = 3;
  cfg.feat_dim = 3;
  cfg.gnn.layers = idx % 3;
  cfg.gnn.topk = 2;
  const WeightMode modes[] = {WeightMode::kSoft, WeightMode::kTopK, WeightMode::kUniform};
  cfg.gnn.weight_mode = modes[(idx / 3) % 3];
  cfg.gnn.neighborhood =
      idx % 2 ? Neighborhood::kAntecedents : Neighborhood::kBidirectional;
  const double gammas[] = {0.3, 0.7, 1.0};
  cfg.gamma = gammas[(idx / 2) % 3];
  return cfg;
}

}  // namespace

void check_decode_instance(const ScoreTable& t, const AntecedentTree& eisner,
                           const AntecedentTree& pipeline, SuiteReport& rep,
                           const std::string& label) {
  require(t.n <= 10, "oracle: enumeration bound exceeded");
  ++rep.instances;
  const double es = tree_score(t, eisner);
  const double hs = tree_score(t, pipeline);
  const AntecedentTree brute = brute_force_decode(t, 10);
  const double bs = tree_score(t, brute);

  if (hs < es - 1e-12) {
    note_failure(rep, dump_decode_instance(t, label, "pipeline scored below Eisner"));
    rep.worst = std::max(rep.worst, es - hs);
  }

  double best_enum = 0.0;  // the all-eps tree scores 0
  std::vector<int> head(t.n, kEps);
  enumerate_heads(t, 0, head, [&](const std::vector<int>& h) {
    ++rep.checked;
    const double s = tree_score(t, AntecedentTree{h});
    best_enum = std::max(best_enum, s);
    if (projective(h) && s > es + 1e-9) {
      note_failure(rep, dump_decode_instance(t, label, "Eisner missed a projective tree"));
      rep.worst = std::max(rep.worst, s - es);
    }
  });
  if (std::abs(bs - best_enum) > 1e-9)
    note_failure(rep, dump_decode_instance(t, label, "brute force disagrees with enumeration"));
  if (projective(brute.head) && std::abs(hs - bs) > 1e-9) {
    note_failure(rep, dump_decode_instance(t, label, "pipeline missed a projective optimum"));
    rep.worst = std::max(rep.worst, std::abs(hs - bs));
  }
  if (t.mode == ArcMode::kLearned && t.gamma == 1.0) {
    double rowmax_sum = 0.0;
    for (int i = 0; i < t.n; ++i) {
      double m = 0.0;  // eps
      for (int j : t.cand[i]) m = std::max(m, t.first.at(i, j));
      rowmax_sum += m;
    }
    if (std::abs(hs - rowmax_sum) > 1e-9) {
      note_failure(rep, dump_decode_instance(t, label, "gamma=1 score != sum of row maxima"));
      rep.worst = std::max(rep.worst, std::abs(hs - rowmax_sum));
    }
  }
}

SuiteReport decoder_oracle_suite(uint64_t seed, int instances, int max_n) {
  SuiteReport rep;
  rep.name = "decoder-vs-brute-force";
  Rng rng(seed);
  const double gammas[] = {0.0, 0.5, 0.8, 1.0};
  for (int it = 0; it < instances; ++it) {
    const ScoreTable t = random_decode_table(rng, max_n, gammas[it % 4]);
    const AntecedentTree eisner = eisner_second_order(t);
    const AntecedentTree hill = hill_climb(t, eisner);
    check_decode_instance(t, eisner, hill, rep, "instance " + std::to_string(it));
  }
  return rep;
}

SuiteReport gradient_oracle_suite(uint64_t seed, int instances, double tol) {
  SuiteReport rep;
  rep.name = "gradient-vs-finite-difference";
  Rng rng(seed);
  const EmbeddingProvider emb = EmbeddingProvider::synthetic(3, seed ^ 0x9e3779b9);
  // retry degenerate draws (no candidate pairs) so the report counts real ones
  for (int it = 0; rep.instances < instances && it < 3 * instances; ++it) {
    const ModelConfig cfg = gradient_config(it);
    const double lambda = it % 2 ? 0.001 : 0.01;
    ParamStore ps;
    Rng prng(rng.next_u64());
    register_model_params(ps, cfg, prng);

    Graph g;
    CorefModel model = CorefModel::bind(g, ps, cfg);
    const Document doc = random_gradient_doc(rng);
    DocForward fwd = model.forward(g, emb, doc);
    if (fwd.scores < 0) continue;  // no candidate pairs; nothing differentiable
    GoldAnnotation gold = gold_antecedent_sets(doc, fwd.set.spans, fwd.set.candidates);
    NodeId lb = loss_base_node(g, fwd, gold);
    NodeId ls = loss_sibling_node(g, model, fwd, gold, -1);
    NodeId total = total_loss_node(g, lb, ls, lambda);
    if (total < 0) continue;
    ++rep.instances;

    std::vector<NodeId> leaves;
    for (const auto& [name, id] : model.param_nodes) leaves.push_back(id);
    const FdResult r = fd_check(g, total, leaves);
    rep.checked += r.checked;
    rep.worst = std::max(rep.worst, r.max_rel_err);
    if (r.max_rel_err > tol) {
      std::ostringstream os;
      os << "gradient mismatch: rel err " << r.max_rel_err << " [instance " << it
         << " layers=" << cfg.gnn.layers << " mode=" << to_string(cfg.gnn.weight_mode)
         << " gamma=" << cfg.gamma << " lambda=" << lambda << "]";
      note_failure(rep, os.str());
    }
  }
  return rep;
}

std::string format_report(const SuiteReport& r) {
  std::ostringstream os;
  os << (r.ok() ? "PASS" : "FAIL") << " " << r.name << ": " << r.instances << " instances, "
     << r.checked << " checks, " << r.failures << " failures, worst deviation " << r.worst
     << "\n";
  for (const std::string& n : r.notes) os << n << "\n";
  return os.str();
}

}  // namespace coref
