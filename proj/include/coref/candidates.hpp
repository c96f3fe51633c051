#pragma once

#include <string>
#include <vector>

#include "coref/document.hpp"
#include "coref/tensor.hpp"

namespace coref {

struct CandidateConfig {
  int max_width = 10;
  double spans_ratio = 0.4;
  int top_k = 50;
};

// Retained spans in document order with their mention scores and candidate
// antecedent sets. Y_i holds indices of earlier retained spans (ascending);
// the dummy antecedent is implicit and always available.
struct SpanSet {
  std::vector<Span> spans;
  std::vector<double> mention_scores;
  std::vector<std::vector<int>> candidates;
};

// All spans of width <= max_width that stay inside one sentence, in
// (start, end) lexicographic order.
std::vector<Span> enumerate_spans(const Document& doc, int max_width);

// Keeps the top ceil(spans_ratio * T) spans by mention score (ties broken
// by (start, end)), dropping any span that partially overlaps an already
// accepted higher-scoring span. Returns indices into `spans`, re-sorted to
// document order.
std::vector<int> prune_mentions(const std::vector<Span>& spans,
                                const std::vector<double>& mention_scores, double spans_ratio,
                                int n_tokens);

// True when the spans overlap without one containing the other.
bool spans_cross(const Span& a, const Span& b);

// Y_i = top-K earlier retained spans by the coarse score
// s_c(i,j) = s_m(i) + s_m(j) + g_i^T W_c g_j; score ties prefer the nearer
// span. g holds one row per retained span.
std::vector<std::vector<int>> select_candidate_antecedents(const std::vector<double>& s_m,
                                                           const Tensor& g, const Tensor& w_c,
                                                           int top_k);

// Fraction of anaphoric gold mentions whose candidate set reaches at least
// one gold antecedent. Reported every run; never fed back into pruning.
struct GoldReachability {
  int anaphoric = 0;
  int reachable = 0;

  double fraction() const { return anaphoric == 0 ? 1.0 : double(reachable) / anaphoric; }
};
GoldReachability gold_reachability(const Document& doc, const SpanSet& set);

// Debug dump: one line per retained span with s_m and Y_i.
std::string dump_spanset(const Document& doc, const SpanSet& set);

}  // namespace coref
