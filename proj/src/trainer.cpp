#include "coref/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "json.hpp"

namespace coref {

std::vector<int> candidate_siblings(int i, int j, int cap) {
  require(j >= 0 && j < i, "candidate_siblings: need 0 <= j < i");
  std::vector<int> out{kZeta};
  int lo = j + 1;
  if (cap >= 0) lo = std::max(lo, i - cap);
  for (int k = lo; k < i; ++k) out.push_back(k);
  return out;
}

std::vector<int> gold_cluster_ids(const Document& doc, const std::vector<Span>& spans) {
  std::map<Span, int> where;
  for (size_t c = 0; c < doc.gold_clusters.size(); ++c)
    for (const Span& s : doc.gold_clusters[c]) where[s] = static_cast<int>(c);
  std::vector<int> out(spans.size(), -1);
  for (size_t i = 0; i < spans.size(); ++i) {
    auto it = where.find(spans[i]);
    if (it != where.end()) out[i] = it->second;
  }
  return out;
}

NodeId loss_base_node(Graph& g, const DocForward& fwd, const GoldAnnotation& gold) {
  const int n = fwd.n_spans();
  if (n == 0 || fwd.scores < 0) return -1;
  require(static_cast<int>(gold.antecedents.size()) == n, "loss_base: gold size mismatch");

  NodeId zero = g.leaf(Tensor(1, 1));
  NodeId ext = g.concat_rows({fwd.scores, zero});
  const int zrow = g.value(fwd.scores).rows();

  std::vector<NodeId> terms;
  terms.reserve(n);
  for (int i = 0; i < n; ++i) {
    const auto& ci = fwd.set.candidates[i];
    std::vector<int> rows{zrow};
    rows.reserve(ci.size() + 1);
    for (size_t c = 0; c < ci.size(); ++c) rows.push_back(fwd.offsets[i] + static_cast<int>(c));
    NodeId all = g.logsumexp_rows(
        g.reshape(g.gather_rows(ext, rows), 1, static_cast<int>(rows.size())));
    if (gold.antecedents[i].empty()) {
      terms.push_back(g.scale(all, -1.0));  // numerator is the dummy alone, at 0
      continue;
    }
    std::vector<int> grows;
    grows.reserve(gold.antecedents[i].size());
    for (int j : gold.antecedents[i]) {
      auto it = std::lower_bound(ci.begin(), ci.end(), j);
      require(it != ci.end() && *it == j, "loss_base: gold antecedent outside Y_i");
      grows.push_back(fwd.offsets[i] + static_cast<int>(it - ci.begin()));
    }
    NodeId num = g.logsumexp_rows(
        g.reshape(g.gather_rows(ext, grows), 1, static_cast<int>(grows.size())));
    terms.push_back(g.sub(num, all));
  }
  return g.sum_all(g.concat_rows(terms));
}

NodeId loss_sibling_node(Graph& g, const CorefModel& model, const DocForward& fwd,
                         const GoldAnnotation& gold, int sib_cap) {
  require(model.cfg.arc_mode == ArcMode::kLearned,
          "loss_sibling: requires the learned arc-pair mode");
  const int n = fwd.n_spans();
  if (n == 0 || fwd.scores < 0) return -1;
  const auto& cand = fwd.set.candidates;
  const std::vector<int> cluster = gold_cluster_ids(*fwd.doc, fwd.set.spans);
  const double gamma = model.cfg.gamma;

  // Sibling lists per contributing (i, candidate) plus one batched s_p call.
  std::vector<std::array<int, 3>> triples;
  std::vector<std::vector<std::vector<int>>> K(n), sp_row(n);
  for (int i = 0; i < n; ++i) {
    if (gold.antecedents[i].empty()) continue;
    K[i].resize(cand[i].size());
    sp_row[i].resize(cand[i].size());
    for (size_t c = 0; c < cand[i].size(); ++c) {
      K[i][c] = candidate_siblings(i, cand[i][c], sib_cap);
      sp_row[i][c].assign(K[i][c].size(), -1);
      for (size_t q = 1; q < K[i][c].size(); ++q) {  // q = 0 is the dummy sibling
        sp_row[i][c][q] = static_cast<int>(triples.size());
        triples.push_back({i, cand[i][c], K[i][c][q]});
      }
    }
  }

  NodeId zero = g.leaf(Tensor(1, 1));
  NodeId first_ext = g.concat_rows({fwd.scores, zero});
  const int zrow_first = g.value(fwd.scores).rows();
  NodeId sp = triples.empty() ? -1 : model.scorer.second_order_scores(g, fwd.reps, triples);
  NodeId sp_ext = sp < 0 ? zero : g.concat_rows({sp, zero});
  const int zrow_sp = sp < 0 ? 0 : static_cast<int>(triples.size());

  std::vector<NodeId> terms;
  for (int i = 0; i < n; ++i) {
    if (gold.antecedents[i].empty()) continue;
    std::vector<int> jrows{zrow_first}, krows{zrow_sp};  // the (ε, ζ) pair at 0
    std::vector<int> num_pos;
    int pos = 1;
    for (size_t c = 0; c < cand[i].size(); ++c) {
      const int j = cand[i][c];
      const bool j_gold = std::find(gold.antecedents[i].begin(), gold.antecedents[i].end(), j) !=
                          gold.antecedents[i].end();
      const auto& sibs = K[i][c];
      std::vector<char> gold_sib(sibs.size(), 0);
      bool any = false;
      for (size_t q = 1; q < sibs.size(); ++q)
        if (cluster[sibs[q]] == cluster[i]) {
          gold_sib[q] = 1;
          any = true;
        }
      if (!any) gold_sib[0] = 1;  // ζ is the gold sibling of a first child
      for (size_t q = 0; q < sibs.size(); ++q) {
        jrows.push_back(fwd.offsets[i] + static_cast<int>(c));
        krows.push_back(q == 0 ? zrow_sp : sp_row[i][c][q]);
        if (j_gold && gold_sib[q]) num_pos.push_back(pos);
        ++pos;
      }
    }
    NodeId col = g.add(g.scale(g.gather_rows(first_ext, jrows), gamma),
                       g.scale(g.gather_rows(sp_ext, krows), 1.0 - gamma));
    NodeId den =
        g.logsumexp_rows(g.reshape(col, 1, static_cast<int>(jrows.size())));
    NodeId num = g.logsumexp_rows(
        g.reshape(g.gather_rows(col, num_pos), 1, static_cast<int>(num_pos.size())));
    terms.push_back(g.sub(num, den));
  }
  if (terms.empty()) return -1;
  return g.sum_all(g.concat_rows(terms));
}

NodeId total_loss_node(Graph& g, NodeId l_base, NodeId l_sib, double lambda) {
  NodeId total = l_base < 0 ? -1 : g.scale(l_base, -1.0);
  if (l_sib >= 0 && lambda != 0.0) {
    NodeId s = g.scale(l_sib, -lambda);
    total = total < 0 ? s : g.add(total, s);
  }
  return total;
}

CorpusMetrics evaluate_corpus(const ParamStore& params, const ModelConfig& cfg,
                              const EmbeddingProvider& emb, const std::vector<Document>& docs) {
  CorpusMetrics m;
  for (const Document& doc : docs)
    m.add_document(doc.gold_clusters, predict_clusters(params, cfg, emb, doc));
  return m;
}

TrainResult train_model(ParamStore& params, const ModelConfig& mcfg, const TrainConfig& tcfg,
                        const EmbeddingProvider& emb, const std::vector<Document>& train_docs,
                        const std::vector<Document>& dev_docs) {
  require(!train_docs.empty(), "train: empty corpus");
  require(tcfg.lambda >= 0.0, "train: lambda must be >= 0");
  require(mcfg.gamma >= 0.0 && mcfg.gamma <= 1.0, "train: gamma must lie in [0, 1]");

  TrainResult out;
  AdamConfig adam;
  for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
    adam.lr = tcfg.lr * std::pow(tcfg.decay, epoch);
    double loss_sum = 0.0;
    int counted = 0;
    double reach_n = 0.0, reach_d = 0.0;
    for (const Document& doc : train_docs) {
      try {
        Graph g;
        CorefModel model = CorefModel::bind(g, params, mcfg);
        DocForward fwd = model.forward(g, emb, doc);
        if (fwd.n_spans() == 0) continue;
        GoldReachability r = gold_reachability(doc, fwd.set);
        reach_n += r.reachable;
        reach_d += r.anaphoric;

        GoldAnnotation gold = gold_antecedent_sets(doc, fwd.set.spans, fwd.set.candidates);
        NodeId lb = loss_base_node(g, fwd, gold);
        NodeId ls =
            tcfg.lambda == 0.0 ? -1 : loss_sibling_node(g, model, fwd, gold, tcfg.sib_cap);
        NodeId total = total_loss_node(g, lb, ls, tcfg.lambda);
        if (total < 0) continue;  // the loss is a constant; nothing to learn from
        const double lv = g.value(total).item();
        require(std::isfinite(lv), "non-finite loss");
        loss_sum += lv;
        ++counted;

        g.backward(total);
        std::vector<Tensor> grads(params.size());
        for (const auto& [name, id] : model.param_nodes)
          grads[params.index_of(name)] = g.grad(id);
        clip_global_norm(grads, tcfg.clip);
        adam_step(params, grads, adam);
      } catch (const CorefError& e) {
        if (std::string(e.what()).find("non-finite") == std::string::npos) throw;
        throw DivergenceError("train: diverged on document " + doc.doc_id + ": " + e.what());
      }
    }

    CorpusMetrics train_m = evaluate_corpus(params, mcfg, emb, train_docs);
    out.train_loss = counted ? loss_sum / counted : 0.0;
    out.train_avg_f1 = train_m.avg_f1();
    nlohmann::json entry{{"epoch", epoch},
                         {"seed", tcfg.seed},
                         {"lr", adam.lr},
                         {"train_loss", out.train_loss},
                         {"train_avg_f1", out.train_avg_f1},
                         {"gold_reachability", reach_d > 0 ? reach_n / reach_d : 1.0}};
    if (!dev_docs.empty()) {
      CorpusMetrics m = evaluate_corpus(params, mcfg, emb, dev_docs);
      out.dev_avg_f1 = m.avg_f1();
      entry["dev"] = {{"muc_f1", m.muc().f1},
                      {"b3_f1", m.b_cubed().f1},
                      {"ceaf_f1", m.ceaf_phi4().f1},
                      {"mention_f1", m.mention_detection().f1},
                      {"avg_f1", out.dev_avg_f1}};
    }
    out.epoch_log.push_back(entry.dump());
    if (tcfg.stop_at_f1 >= 0.0 && out.train_avg_f1 >= tcfg.stop_at_f1) break;
  }
  return out;
}

}  // namespace coref
