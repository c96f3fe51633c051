#include "coref/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace coref {

std::vector<Span> enumerate_spans(const Document& doc, int max_width) {
  require(max_width >= 1, "enumerate_spans: max_width must be >= 1");
  const int T = static_cast<int>(doc.tokens.size());
  std::vector<int> starts = doc.sentence_starts.empty() ? std::vector<int>{0}
                                                        : doc.sentence_starts;
  std::vector<Span> out;
  for (size_t s = 0; s < starts.size(); ++s) {
    const int lo = starts[s];
    const int hi = (s + 1 < starts.size() ? starts[s + 1] : T) - 1;
    for (int b = lo; b <= hi; ++b)
      for (int e = b; e <= std::min(hi, b + max_width - 1); ++e) out.push_back(Span{b, e});
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool spans_cross(const Span& a, const Span& b) {
  return (a.start < b.start && b.start <= a.end && a.end < b.end) ||
         (b.start < a.start && a.start <= b.end && b.end < a.end);
}

std::vector<int> prune_mentions(const std::vector<Span>& spans,
                                const std::vector<double>& mention_scores, double spans_ratio,
                                int n_tokens) {
  require(spans.size() == mention_scores.size(), "prune: score per span required");
  const int cap = static_cast<int>(std::ceil(spans_ratio * n_tokens));
  std::vector<int> order(spans.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (mention_scores[a] != mention_scores[b]) return mention_scores[a] > mention_scores[b];
    return spans[a] < spans[b];
  });

  std::vector<int> accepted;
  for (int idx : order) {
    if (static_cast<int>(accepted.size()) >= cap) break;
    bool crosses = false;
    for (int kept : accepted)
      if (spans_cross(spans[idx], spans[kept])) {
        crosses = true;
        break;
      }
    if (!crosses) accepted.push_back(idx);
  }
  std::sort(accepted.begin(), accepted.end(),
            [&](int a, int b) { return spans[a] < spans[b]; });
  return accepted;
}

std::vector<std::vector<int>> select_candidate_antecedents(const std::vector<double>& s_m,
                                                           const Tensor& g, const Tensor& w_c,
                                                           int top_k) {
  const int n = static_cast<int>(s_m.size());
  require(g.rows() == n, "candidates: one representation row per span");
  require(w_c.rows() == g.cols() && w_c.cols() == g.cols(), "candidates: W_c shape");
  const int d = g.cols();

  // b_i = g_i^T W_c, so the bilinear term is b_i . g_j
  Tensor b(n, d);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) {
      double acc = 0.0;
      for (int r = 0; r < d; ++r) acc += g.at(i, r) * w_c.at(r, c);
      b.at(i, c) = acc;
    }

  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> scored;
    scored.reserve(i);
    for (int j = 0; j < i; ++j) {
      double bilin = 0.0;
      for (int c = 0; c < d; ++c) bilin += b.at(i, c) * g.at(j, c);
      scored.emplace_back(s_m[i] + s_m[j] + bilin, j);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b2) {
      if (a.first != b2.first) return a.first > b2.first;
      return a.second > b2.second;  // nearer span wins ties
    });
    const int take = std::min<int>(top_k, static_cast<int>(scored.size()));
    for (int k = 0; k < take; ++k) out[i].push_back(scored[k].second);
    std::sort(out[i].begin(), out[i].end());
  }
  return out;
}

GoldReachability gold_reachability(const Document& doc, const SpanSet& set) {
  std::map<Span, int> cluster_of;
  for (size_t c = 0; c < doc.gold_clusters.size(); ++c)
    for (const Span& s : doc.gold_clusters[c]) cluster_of[s] = static_cast<int>(c);
  std::map<Span, int> retained_pos;
  for (size_t i = 0; i < set.spans.size(); ++i) retained_pos[set.spans[i]] = static_cast<int>(i);

  GoldReachability r;
  for (const Cluster& cluster : doc.gold_clusters) {
    for (size_t m = 1; m < cluster.size(); ++m) {  // spans sorted; m has antecedents
      ++r.anaphoric;
      auto it = retained_pos.find(cluster[m]);
      if (it == retained_pos.end()) continue;
      const int i = it->second;
      bool reached = false;
      for (int j : set.candidates[i]) {
        auto jt = cluster_of.find(set.spans[j]);
        if (jt != cluster_of.end() &&
            cluster_of.at(cluster[m]) == jt->second) {
          reached = true;
          break;
        }
      }
      if (reached) ++r.reachable;
    }
  }
  return r;
}

std::string dump_spanset(const Document& doc, const SpanSet& set) {
  std::ostringstream out;
  out << "doc " << doc.doc_id << " retained " << set.spans.size() << "\n";
  for (size_t i = 0; i < set.spans.size(); ++i) {
    const Span& s = set.spans[i];
    out << i << " [" << s.start << "," << s.end << "] s_m=" << set.mention_scores[i] << " Y={";
    for (size_t k = 0; k < set.candidates[i].size(); ++k)
      out << (k ? "," : "") << set.candidates[i][k];
    out << "}\n";
  }
  return out.str();
}

}  // namespace coref
