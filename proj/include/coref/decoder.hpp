#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "coref/tensor.hpp"

namespace coref {

// Dummy antecedent (tree root) and dummy sibling.
inline constexpr int kEps = -1;
inline constexpr int kZeta = -1;

enum class ArcMode { kLearned, kAblation };

// Dense decoding scores over n retained spans. The first-order matrix holds
// s(i,j) for every j < i; candidate sets restrict which heads a decoder may
// pick, not which entries exist (sibling terms in ablation mode may consult
// non-candidate pairs). Second-order scores come from a callback and are
// memoized, since hill-climbing revisits triples.
struct ScoreTable {
  int n = 0;
  ArcMode mode = ArcMode::kLearned;
  double gamma = 0.8;
  Tensor first;                                 // n x n, lower triangle used
  std::vector<std::vector<int>> cand;           // Y_i, ascending
  std::function<double(int, int, int)> second;  // s_p(i,j,k) for j < k < i

  void finalize();
  bool candidate(int i, int j) const {
    return j == kEps || (j >= 0 && j < i && in_cand_[i][j]);
  }

  // s(i, eps) = 0 by definition.
  double first_order(int i, int j) const { return j == kEps ? 0.0 : first.at(i, j); }
  // s_p(i, j, zeta) = 0; absent callback means a pure first-order table.
  double second_order(int i, int j, int k) const;
  // Full arc-pair score of span i taking head j with nearest left sibling k.
  // Arcs to eps contribute exactly 0 in both modes: their sibling is forced
  // to zeta because a shared dummy head does not make spans coreferent.
  double arc_score(int i, int j, int k) const;

 private:
  std::vector<std::vector<char>> in_cand_;
  mutable std::unordered_map<long long, double> cache_;
};

// head[i] ∈ Y_i ∪ {eps}; heads always precede their spans, so any such
// vector is a tree rooted at eps.
struct AntecedentTree {
  std::vector<int> head;
};

// Nearest left sibling per span: the closest earlier span with the same
// head, or zeta. Derived purely from the head vector.
std::vector<int> left_siblings(const std::vector<int>& head);

// Σ_i arc_score(i, head(i), sib(i)). Throws on heads outside Y_i ∪ {eps}.
double tree_score(const ScoreTable& t, const AntecedentTree& tree);

// head(i) = argmax over Y_i ∪ {eps} of s(i,j); ties toward eps, then the
// nearest candidate.
AntecedentTree greedy_decode(const ScoreTable& t);

// Maximum-score projective tree over positions (eps, 1..n) under
// sibling-factored arc-pair scoring, heads restricted to Y_i ∪ {eps}.
AntecedentTree eisner_second_order(const ScoreTable& t);

// Repeatedly applies the single best strictly-improving head reassignment.
// max_iters < 0 means 2n. Output score >= input score.
AntecedentTree hill_climb(const ScoreTable& t, AntecedentTree tree, int max_iters = -1);

// Exact maximizer by exhaustive enumeration; ties resolve to the
// lexicographically smallest head vector (eps ordered before any span).
AntecedentTree brute_force_decode(const ScoreTable& t, int bound = 8);

// Connected components of non-eps arcs; singleton components are dropped.
// Members ascending, components ordered by first member.
std::vector<std::vector<int>> clusters_from_tree(const AntecedentTree& tree);

// One line per span: index, head, nearest left sibling.
std::string dump_tree(const AntecedentTree& tree);

}  // namespace coref
