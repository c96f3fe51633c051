// Acceptance harness: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion is self-contained and seeded, so a failure can be
// reproduced by running the binary again.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "coref/document.hpp"
#include "coref/gnn.hpp"
#include "coref/metrics.hpp"
#include "coref/model.hpp"
#include "coref/oracles.hpp"
#include "coref/rng.hpp"
#include "coref/trainer.hpp"
#include "support/conll_fuzz.hpp"
#include "support/necr.hpp"
#include "support/synth.hpp"

using namespace coref;
using coref::testing::string_match_corpus;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool bits_equal(const Tensor& a, const Tensor& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0;
}

// ---- 1. gradients vs central finite differences --------------------------

Outcome criterion_gradients() {
  const SuiteReport r = gradient_oracle_suite(4242, 100, 1e-4);
  Outcome o;
  o.ok = r.ok() && r.instances >= 100;
  std::ostringstream os;
  os << r.instances << " instances, " << r.checked << " coordinates, worst rel err " << r.worst;
  for (const std::string& n : r.notes) os << "; " << n;
  o.detail = os.str();
  return o;
}

// ---- 2. decoder vs exhaustive enumeration --------------------------------

Outcome criterion_decoder() {
  const SuiteReport r = decoder_oracle_suite(1717, 200, 7);
  Outcome o;
  o.ok = r.ok() && r.instances >= 200;
  std::ostringstream os;
  os << r.instances << " instances, " << r.checked << " enumerated trees, " << r.failures
     << " failures";
  for (const std::string& n : r.notes) os << "; " << n;
  o.detail = os.str();
  return o;
}

// ---- 3. zero-layer, no-sibling reduction to the plain ranking model ------

Outcome criterion_reduction() {
  ModelConfig cfg;
  cfg.enc.d_emb = 6;
  cfg.enc.d_lstm = 5;
  cfg.enc.d_width = 3;
  cfg.cand.max_width = 2;
  cfg.cand.spans_ratio = 0.8;
  cfg.cand.top_k = 10;
  cfg.hidden = 8;
  ParamStore ps;
  Rng rng(83);
  register_model_params(ps, cfg, rng);
  const EmbeddingProvider emb = EmbeddingProvider::synthetic(cfg.enc.d_emb, 89);

  const testing::NecrComparison cmp =
      testing::compare_necr_reduction(cfg, ps, emb, string_match_corpus(10, 97));
  Outcome o;
  o.ok = cmp.ok() && cmp.docs == 10;
  std::ostringstream os;
  os << cmp.docs << " docs bit-compared, mismatches: loss " << cmp.loss_mismatch << ", grads "
     << cmp.grad_mismatch << ", clusters " << cmp.cluster_mismatch << ", aux-gradient "
     << cmp.aux_nonzero;
  o.detail = os.str();
  return o;
}

// ---- 4. refinement-layer algebra ------------------------------------------

// Identity span representations turn the aggregate rows into the edge-weight
// vectors themselves: a_i = sum_j alpha_ij e_j, so agg[i][j] = alpha_ij.
Outcome criterion_gnn_algebra() {
  const int n = 7;
  ScorerConfig scfg;
  scfg.g_dim = n;
  scfg.hidden = 6;
  scfg.feat_dim = 3;
  ParamStore ps;
  Rng rng(4711);
  register_scorer_params(ps, scfg, rng);
  register_gnn_params(ps, n, rng);

  Document doc;
  doc.tokens.assign(2 * n, "w");
  doc.sentence_starts = {0};
  for (int t = 0; t < 2 * n; ++t) doc.speakers.push_back(t % 4 < 2 ? "s0" : "s1");
  doc.genre = 1;
  std::vector<Span> spans;
  for (int i = 0; i < n; ++i) spans.push_back(Span{2 * i, 2 * i + 1});
  std::vector<std::vector<int>> cand(n);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - 3); j < i; ++j) cand[i].push_back(j);
  const PairContext ctx{&doc, &spans};

  Tensor ident(n, n);
  for (int i = 0; i < n; ++i) ident.at(i, i) = 1.0;

  int checks = 0, bad = 0;
  std::ostringstream why;
  auto expect = [&](bool cond, const char* what, int i, int j) {
    ++checks;
    if (!cond && bad++ < 3) why << "; " << what << " at (" << i << "," << j << ")";
  };

  for (const WeightMode mode :
       {WeightMode::kSoft, WeightMode::kHard1, WeightMode::kTopK, WeightMode::kUniform}) {
    Graph g;
    GnnConfig gcfg;
    gcfg.layers = 1;
    gcfg.weight_mode = mode;
    gcfg.topk = 2;
    Gnn gnn = Gnn::bind(g, ps, gcfg);
    Scorer scr = Scorer::bind(g, ps, scfg);
    NodeId reps = g.leaf(ident);
    NodeId agg = 0;
    NodeId refined = gnn.refine_layer(g, scr, ctx, cand, reps, &agg);
    const Tensor& a = g.value(agg);
    const Tensor& v2 = g.value(refined);

    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      int nonzero = 0;
      for (int j = 0; j < n; ++j) {
        const double w = a.at(i, j);
        sum += w;
        nonzero += w != 0.0;
        const bool in_y =
            std::find(cand[i].begin(), cand[i].end(), j) != cand[i].end();
        if (!in_y) expect(w == 0.0, "weight outside Y_i", i, j);
        if (mode == WeightMode::kUniform && in_y)
          expect(std::abs(w - 1.0 / double(cand[i].size())) <= 1e-12, "uniform weight", i, j);
      }
      if (cand[i].empty()) {
        expect(sum == 0.0, "empty-Y_i aggregate", i, -1);
        continue;
      }
      if (mode == WeightMode::kHard1) {
        expect(nonzero == 1 && sum == 1.0, "hard1 one-hot", i, -1);
      } else if (mode == WeightMode::kTopK) {
        expect(nonzero == std::min<int>(2, int(cand[i].size())), "topk support", i, -1);
        expect(std::abs(sum - 1.0) <= 1e-9, "topk normalization", i, -1);
      } else {
        expect(std::abs(sum - 1.0) <= 1e-9, "soft normalization", i, -1);
      }
    }

    // gate output stays coordinatewise between the input and the aggregate
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < n; ++c) {
        const double v = ident.at(i, c), av = a.at(i, c), out = v2.at(i, c);
        expect(out >= std::min(v, av) - 1e-12 && out <= std::max(v, av) + 1e-12,
               "gate interpolation bound", i, c);
      }
  }

  // bidirectional edges reuse alpha_ki; the gate bound must still hold
  {
    Graph g;
    GnnConfig gcfg;
    gcfg.layers = 1;
    gcfg.neighborhood = Neighborhood::kBidirectional;
    Gnn gnn = Gnn::bind(g, ps, gcfg);
    Scorer scr = Scorer::bind(g, ps, scfg);
    NodeId agg = 0;
    NodeId refined = gnn.refine_layer(g, scr, ctx, cand, g.leaf(ident), &agg);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < n; ++c) {
        const double v = ident.at(i, c), av = g.value(agg).at(i, c),
                     out = g.value(refined).at(i, c);
        expect(out >= std::min(v, av) - 1e-12 && out <= std::max(v, av) + 1e-12,
               "bidirectional gate bound", i, c);
      }
  }

  // zero layers: refine returns its input node untouched
  {
    Graph g;
    GnnConfig gcfg;
    gcfg.layers = 0;
    Gnn gnn = Gnn::bind(g, ps, gcfg);
    Scorer scr = Scorer::bind(g, ps, scfg);
    NodeId reps = g.leaf(ident);
    NodeId out = gnn.refine(g, scr, ctx, cand, reps);
    expect(out == reps && bits_equal(g.value(out), ident), "layer-0 identity", -1, -1);
  }

  // two configured layers equal two manual single-layer applications, bitwise
  for (const Neighborhood nb : {Neighborhood::kAntecedents, Neighborhood::kBidirectional}) {
    Graph g;
    GnnConfig gcfg;
    gcfg.layers = 2;
    gcfg.neighborhood = nb;
    Gnn gnn = Gnn::bind(g, ps, gcfg);
    Scorer scr = Scorer::bind(g, ps, scfg);
    NodeId reps = g.leaf(ident);
    NodeId two = gnn.refine(g, scr, ctx, cand, reps);
    NodeId step = gnn.refine_layer(g, scr, ctx, cand, reps);
    NodeId composed = gnn.refine_layer(g, scr, ctx, cand, step);
    expect(bits_equal(g.value(two), g.value(composed)), "two-layer composition", -1, -1);
  }

  Outcome o;
  o.ok = bad == 0;
  std::ostringstream os;
  os << checks << " algebraic checks over 4 weight modes, " << bad << " violations" << why.str();
  o.detail = os.str();
  return o;
}

// ---- 5. metrics golden values and CEAF alignment vs brute force ----------

double phi4(const Cluster& k, const Cluster& r) {
  Cluster a = k, b = r, both;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  return 2.0 * double(both.size()) / double(a.size() + b.size());
}

// optimal injection by trying every permutation of the padded square matrix
double brute_alignment(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  const int m = int(std::max(key.size(), response.size()));
  std::vector<std::vector<double>> sim(m, std::vector<double>(m, 0.0));
  for (size_t i = 0; i < key.size(); ++i)
    for (size_t j = 0; j < response.size(); ++j) sim[i][j] = phi4(key[i], response[j]);
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double total = 0.0;
    for (int i = 0; i < m; ++i) total += sim[i][perm[i]];
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<Cluster> random_partition(Rng& rng, int n_clusters, int pool) {
  std::vector<Span> items;
  for (int i = 0; i < pool; ++i) items.push_back(Span{i, i});
  for (int i = pool - 1; i > 0; --i) std::swap(items[i], items[rng.uniform_int(0, i)]);
  items.resize(rng.uniform_int(n_clusters, pool));
  std::vector<Cluster> cl(n_clusters);
  for (size_t i = 0; i < items.size(); ++i) {
    const int c = int(i) < n_clusters ? int(i) : rng.uniform_int(0, n_clusters - 1);
    cl[c].push_back(items[i]);
  }
  for (Cluster& c : cl) std::sort(c.begin(), c.end());
  return cl;
}

Outcome criterion_metrics() {
  const Span a{0, 0}, b{1, 1}, c{2, 2};
  const std::vector<Cluster> key = {{a, b, c}};
  const std::vector<Cluster> response = {{a, b}, {c}};
  const double muc_f1 = muc(key, response).f1;
  const double b3_f1 = b_cubed(key, response).f1;
  const double ceaf_f1 = ceaf_phi4(key, response).f1;
  const bool golden = std::abs(muc_f1 - 2.0 / 3.0) <= 1e-9 &&
                      std::abs(b3_f1 - 5.0 / 7.0) <= 1e-9 &&
                      std::abs(ceaf_f1 - 0.5333) <= 1e-4;

  Rng rng(9090);
  int mismatches = 0;
  for (int t = 0; t < 500; ++t) {
    const std::vector<Cluster> k = random_partition(rng, rng.uniform_int(1, 6), 12);
    const std::vector<Cluster> r = random_partition(rng, rng.uniform_int(1, 6), 12);
    const PrfParts p = ceaf_phi4_parts(k, r);
    const double brute = brute_alignment(k, r);
    if (std::abs(p.rn - brute) > 1e-9 || std::abs(p.pn - brute) > 1e-9 ||
        p.rd != double(k.size()) || p.pd != double(r.size()))
      ++mismatches;
  }

  Outcome o;
  o.ok = golden && mismatches == 0;
  std::ostringstream os;
  os << "MUC " << muc_f1 << ", B3 " << b3_f1 << ", CEAF " << ceaf_f1 << "; 500 alignments, "
     << mismatches << " brute-force mismatches";
  o.detail = os.str();
  return o;
}

// ---- 6. overfit on string-match corpus + refinement-layer gain -----------

ModelConfig overfit_config(int layers) {
  ModelConfig cfg;
  cfg.enc.d_emb = 16;
  cfg.enc.d_lstm = 12;
  cfg.enc.d_width = 4;
  cfg.cand.max_width = 2;
  cfg.cand.spans_ratio = 2.0;
  cfg.cand.top_k = 30;
  cfg.hidden = 64;
  cfg.feat_dim = 8;
  cfg.gnn.layers = layers;
  return cfg;  // soft weights, gamma 0.8, lambda via TrainConfig default
}

Outcome criterion_overfit() {
  const std::vector<Document> train = string_match_corpus(20, 501);
  const std::vector<Document> dev = string_match_corpus(10, 777);
  const EmbeddingProvider emb = EmbeddingProvider::synthetic(16, 1);

  TrainConfig tcfg;
  tcfg.epochs = 200;
  tcfg.lr = 3e-3;
  tcfg.sib_cap = 8;
  tcfg.stop_at_f1 = 0.95;

  const ModelConfig cfg = overfit_config(1);
  ParamStore ps;
  Rng rng(1);
  register_model_params(ps, cfg, rng);
  const double t0 = now_s();
  const TrainResult res = train_model(ps, cfg, tcfg, emb, train, {});
  const double fit_s = now_s() - t0;
  const bool fit_ok = res.train_avg_f1 >= 0.95 && fit_s < 300.0;

  // one refinement layer should not score below zero layers on held-out
  // docs; mean over five seeds
  TrainConfig dcfg;
  dcfg.epochs = 40;
  dcfg.lr = 3e-3;
  dcfg.sib_cap = 8;
  double mean[2] = {0.0, 0.0};
  for (int layers : {0, 1}) {
    const ModelConfig lcfg = overfit_config(layers);
    for (uint64_t seed = 1; seed <= 5; ++seed) {
      ParamStore lps;
      Rng lrng(seed);
      register_model_params(lps, lcfg, lrng);
      dcfg.seed = seed;
      mean[layers] += train_model(lps, lcfg, dcfg, emb, train, dev).dev_avg_f1 / 5.0;
    }
  }
  const bool gain_ok = mean[1] >= mean[0];

  Outcome o;
  o.ok = fit_ok && gain_ok;
  std::ostringstream os;
  os << "train avg F1 " << res.train_avg_f1 << " after " << res.epoch_log.size() << " epochs ("
     << int(fit_s) << "s); dev mean over 5 seeds: 1-layer " << mean[1] << " vs 0-layer "
     << mean[0];
  o.detail = os.str();
  return o;
}

// ---- 7. persistence and wire-format round-trips ---------------------------

Outcome criterion_roundtrips() {
  std::ostringstream why;
  bool ok = true;
  auto flag = [&](bool cond, const char* what) {
    if (!cond) {
      ok = false;
      why << "; " << what;
    }
  };

  // checkpoint: load restores every tensor bit-exactly, re-save is identical
  {
    ModelConfig cfg;
    cfg.enc.d_emb = 6;
    cfg.enc.d_lstm = 5;
    cfg.enc.d_width = 3;
    cfg.hidden = 8;
    ParamStore saved;
    Rng rng(2222);
    register_model_params(saved, cfg, rng);
    const std::string path = "acc_ckpt_test.bin";
    saved.save(path);
    ParamStore loaded;
    Rng rng2(9999);
    register_model_params(loaded, cfg, rng2);
    loaded.load(path);
    bool same = saved.size() == loaded.size();
    for (size_t i = 0; same && i < saved.size(); ++i)
      same = bits_equal(saved.entry(int(i)).value, loaded.entry(int(i)).value);
    flag(same, "checkpoint load not bit-exact");
    const std::string path2 = "acc_ckpt_test2.bin";
    loaded.save(path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), {});
    const std::string b2((std::istreambuf_iterator<char>(f2)), {});
    flag(!b1.empty() && b1 == b2, "re-saved checkpoint differs");
    std::remove(path.c_str());
    std::remove(path2.c_str());
  }

  // jsonl: serialize(parse(serialize(d))) == serialize(d), including defaults
  {
    for (const Document& d : string_match_corpus(8, 31)) {
      const std::string line = serialize_jsonl_document(d);
      flag(serialize_jsonl_document(parse_jsonl_document(line)) == line,
           "jsonl round-trip drifted");
    }
    const std::string sparse = R"({"tokens":["a","b"],"clusters":[[[0,0],[1,1]]]})";
    const std::string c1 = serialize_jsonl_document(parse_jsonl_document(sparse));
    const std::string c2 = serialize_jsonl_document(parse_jsonl_document(c1));
    flag(c1 == c2, "jsonl canonical form unstable");
  }

  // conll: fuzzed bracket columns parse back to the generator's span record
  {
    Rng rng(6060);
    int rounds_bad = 0;
    for (int round = 0; round < 300; ++round) {
      testing::FuzzEvents ev;
      do {
        ev = testing::fuzz_round(rng, rng.uniform_int(1, 24), rng.uniform_int(1, 5));
      } while (testing::has_cross_cluster_duplicate(ev));
      const auto docs = parse_conll_skeleton(testing::render_conll(ev));
      if (docs.size() != 1 || docs[0].gold_clusters != ev.expected) ++rounds_bad;
    }
    flag(rounds_bad == 0, "conll fuzz mismatch");
  }

  Outcome o;
  o.ok = ok;
  o.detail = ok ? "checkpoint bit-exact, jsonl canonical, 300 conll fuzz rounds"
               : "failed" + why.str();
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;  // wall-clock bound, part of the criterion
    Outcome (*run)();
  };
  const Criterion table[] = {
      {"gradient-vs-finite-difference", 120.0, criterion_gradients},
      {"decoder-vs-brute-force", 180.0, criterion_decoder},
      {"zero-layer-reduction", 0.0, criterion_reduction},
      {"refinement-algebra", 0.0, criterion_gnn_algebra},
      {"metrics-golden", 0.0, criterion_metrics},
      {"overfit-and-refinement-gain", 0.0, criterion_overfit},
      {"format-round-trips", 0.0, criterion_roundtrips},
  };

  int failures = 0;
  for (const Criterion& c : table) {
    const double t0 = now_s();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double dt = now_s() - t0;
    if (c.budget_s > 0.0 && dt >= c.budget_s) {
      o.ok = false;
      o.detail += " [over time budget]";
    }
    std::printf("%s %-30s %6.1fs  %s\n", o.ok ? "PASS" : "FAIL", c.name, dt, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.ok;
  }
  if (failures) std::printf("%d of %zu criteria failed\n", failures, std::size(table));
  return failures ? 1 : 0;
}
