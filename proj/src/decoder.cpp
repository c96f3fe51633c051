#include "coref/decoder.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

namespace coref {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void ScoreTable::finalize() {
  require(n >= 0, "score table: negative size");
  require(first.rows() == n && first.cols() == n, "score table: first-order matrix must be n x n");
  require(static_cast<int>(cand.size()) == n, "score table: one candidate set per span");
  in_cand_.assign(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) {
    int prev = -1;
    for (int j : cand[i]) {
      require(j >= 0 && j < i, "score table: candidate must precede its span");
      require(j > prev, "score table: candidates must be ascending and unique");
      prev = j;
      in_cand_[i][j] = 1;
    }
  }
  cache_.clear();
}

double ScoreTable::second_order(int i, int j, int k) const {
  if (k == kZeta) return 0.0;
  require(j >= 0 && j < k && k < i, "second order: need j < k < i");
  if (!second) return 0.0;
  const long long key = (static_cast<long long>(i) * n + j) * n + k;
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const double v = second(i, j, k);
  cache_.emplace(key, v);
  return v;
}

double ScoreTable::arc_score(int i, int j, int k) const {
  if (j == kEps) return 0.0;
  if (mode == ArcMode::kLearned)
    return gamma * first_order(i, j) + (1.0 - gamma) * second_order(i, j, k);
  double s = first_order(i, j);
  if (k != kZeta) s += first_order(k, j) + first_order(i, k);
  return s;
}

std::vector<int> left_siblings(const std::vector<int>& head) {
  const int n = static_cast<int>(head.size());
  std::vector<int> sib(n, kZeta);
  for (int i = 0; i < n; ++i)
    for (int c = i - 1; c >= 0; --c)
      if (head[c] == head[i]) {
        sib[i] = c;
        break;
      }
  return sib;
}

double tree_score(const ScoreTable& t, const AntecedentTree& tree) {
  require(static_cast<int>(tree.head.size()) == t.n, "tree score: head vector size mismatch");
  for (int i = 0; i < t.n; ++i)
    require(t.candidate(i, tree.head[i]), "tree score: head outside candidate set");
  const std::vector<int> sib = left_siblings(tree.head);
  double total = 0.0;
  for (int i = 0; i < t.n; ++i)
    if (tree.head[i] != kEps) total += t.arc_score(i, tree.head[i], sib[i]);
  return total;
}

AntecedentTree greedy_decode(const ScoreTable& t) {
  AntecedentTree tree;
  tree.head.assign(t.n, kEps);
  for (int i = 0; i < t.n; ++i) {
    int best = kEps;
    double bs = 0.0;
    for (int j : t.cand[i]) {
      const double s = t.first_order(i, j);
      if (s > bs || (s == bs && best != kEps)) {
        best = j;
        bs = s;
      }
    }
    tree.head[i] = best;
  }
  return tree;
}

namespace {

// Arc-pair score in DP position space: position 0 is eps, position p >= 1 is
// span p-1. Head arcs always point rightward (head position < dependent).
double pos_arc(const ScoreTable& t, int h, int m, int s) {
  if (h == 0) return 0.0;
  const int i = m - 1, j = h - 1;
  if (!t.candidate(i, j)) return kNegInf;
  return t.arc_score(i, j, s <= 0 ? kZeta : s - 1);
}

}  // namespace

AntecedentTree eisner_second_order(const ScoreTable& t) {
  const int N = t.n;
  AntecedentTree tree;
  tree.head.assign(N, kEps);
  if (N == 0) return tree;

  // I[h][m]: arc h->m placed, m still bare, earlier dependents of h complete
  // and tiling (h, m). C[h][e]: h's subtree complete with yield [h, e].
  std::vector<std::vector<double>> I(N + 1, std::vector<double>(N + 1, kNegInf));
  std::vector<std::vector<double>> C(N + 1, std::vector<double>(N + 1, kNegInf));
  std::vector<std::vector<int>> ibp(N + 1, std::vector<int>(N + 1, -2));
  std::vector<std::vector<int>> cbp(N + 1, std::vector<int>(N + 1, -2));
  for (int h = 0; h <= N; ++h) C[h][h] = 0.0;

  for (int w = 1; w <= N; ++w) {
    for (int h = 0; h + w <= N; ++h) {
      const int m = h + w;
      if (w == 1) {
        I[h][m] = pos_arc(t, h, m, -1);
        ibp[h][m] = -1;
      } else {
        for (int s = h + 1; s < m; ++s) {
          if (I[h][s] == kNegInf || C[s][m - 1] == kNegInf) continue;
          const double a = pos_arc(t, h, m, s);
          if (a == kNegInf) continue;
          const double v = I[h][s] + C[s][m - 1] + a;
          if (v > I[h][m]) {
            I[h][m] = v;
            ibp[h][m] = s;
          }
        }
      }
    }
    for (int h = 0; h + w <= N; ++h) {
      const int e = h + w;
      for (int m = h + 1; m <= e; ++m) {
        if (I[h][m] == kNegInf || C[m][e] == kNegInf) continue;
        const double v = I[h][m] + C[m][e];
        if (v > C[h][e]) {
          C[h][e] = v;
          cbp[h][e] = m;
        }
      }
    }
  }

  // peel back the backpointers; every reachable item is finite because the
  // all-eps tree is always representable
  std::vector<std::pair<int, int>> cstack = {{0, N}};
  std::vector<std::pair<int, int>> istack;
  while (!cstack.empty() || !istack.empty()) {
    if (!istack.empty()) {
      const auto [h, m] = istack.back();
      istack.pop_back();
      tree.head[m - 1] = h == 0 ? kEps : h - 1;
      const int s = ibp[h][m];
      require(s != -2, "eisner: missing backpointer");
      if (s != -1) {
        istack.emplace_back(h, s);
        cstack.emplace_back(s, m - 1);
      }
      continue;
    }
    const auto [h, e] = cstack.back();
    cstack.pop_back();
    if (h == e) continue;
    const int m = cbp[h][e];
    require(m != -2, "eisner: missing backpointer");
    istack.emplace_back(h, m);
    cstack.emplace_back(m, e);
  }
  return tree;
}

AntecedentTree hill_climb(const ScoreTable& t, AntecedentTree tree, int max_iters) {
  require(static_cast<int>(tree.head.size()) == t.n, "hill climb: head vector size mismatch");
  const int n = t.n;
  if (max_iters < 0) max_iters = 2 * n;

  // children of each real head, ordered; eps children need no bookkeeping
  // because their arcs score 0 regardless of siblings
  std::vector<std::set<int>> kids(n);
  for (int i = 0; i < n; ++i)
    if (tree.head[i] != kEps) kids[tree.head[i]].insert(i);

  auto prev_kid = [&](int j, int i) {
    const auto& s = kids[j];
    auto it = s.lower_bound(i);
    return it == s.begin() ? kZeta : *std::prev(it);
  };
  auto next_kid = [&](int j, int i) {
    const auto& s = kids[j];
    auto it = s.upper_bound(i);
    return it == s.end() ? -1 : *it;
  };

  // score delta of retargeting span i from its current head to j_new,
  // touching only the three affected arc terms
  auto move_delta = [&](int i, int j_new) {
    const int j_old = tree.head[i];
    double d = 0.0;
    if (j_old != kEps) {
      const int p_old = prev_kid(j_old, i);
      d -= t.arc_score(i, j_old, p_old);
      const int nx = next_kid(j_old, i);
      if (nx != -1) d += t.arc_score(nx, j_old, p_old) - t.arc_score(nx, j_old, i);
    }
    if (j_new != kEps) {
      const int p_new = prev_kid(j_new, i);
      d += t.arc_score(i, j_new, p_new);
      const int nx = next_kid(j_new, i);
      if (nx != -1) d += t.arc_score(nx, j_new, i) - t.arc_score(nx, j_new, p_new);
    }
    return d;
  };

  for (int it = 0; it < max_iters; ++it) {
    int best_i = -1, best_j = 0;
    double best_d = 0.0;
    for (int i = 0; i < n; ++i) {
      if (tree.head[i] != kEps) {
        const double d = move_delta(i, kEps);
        if (d > best_d) {
          best_d = d;
          best_i = i;
          best_j = kEps;
        }
      }
      for (int j : t.cand[i]) {
        if (j == tree.head[i]) continue;
        const double d = move_delta(i, j);
        if (d > best_d) {
          best_d = d;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_i < 0) break;
    if (tree.head[best_i] != kEps) kids[tree.head[best_i]].erase(best_i);
    tree.head[best_i] = best_j;
    if (best_j != kEps) kids[best_j].insert(best_i);
  }
  return tree;
}

AntecedentTree brute_force_decode(const ScoreTable& t, int bound) {
  require(t.n <= bound, "brute force: instance too large");
  AntecedentTree cur, best;
  cur.head.assign(t.n, kEps);
  best.head.assign(t.n, kEps);
  double best_score = tree_score(t, best);

  // odometer over per-span options (eps first, then ascending candidates),
  // visiting head vectors in lexicographic order; strict improvement keeps
  // the lexicographically smallest maximizer
  std::vector<int> pos(t.n, -1);  // -1 = eps, else index into cand[i]
  while (true) {
    int i = t.n - 1;
    for (; i >= 0; --i) {
      if (pos[i] + 1 < static_cast<int>(t.cand[i].size())) {
        ++pos[i];
        cur.head[i] = t.cand[i][pos[i]];
        break;
      }
      pos[i] = -1;
      cur.head[i] = kEps;
    }
    if (i < 0) break;
    const double s = tree_score(t, cur);
    if (s > best_score) {
      best_score = s;
      best = cur;
    }
  }
  return best;
}

std::vector<std::vector<int>> clusters_from_tree(const AntecedentTree& tree) {
  const int n = static_cast<int>(tree.head.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (int i = 0; i < n; ++i)
    if (tree.head[i] != kEps) parent[find(i)] = find(tree.head[i]);

  std::vector<std::vector<int>> by_root(n);
  for (int i = 0; i < n; ++i) by_root[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& c : by_root)
    if (c.size() >= 2) out.push_back(std::move(c));
  return out;
}

std::string dump_tree(const AntecedentTree& tree) {
  const std::vector<int> sib = left_siblings(tree.head);
  std::ostringstream os;
  for (size_t i = 0; i < tree.head.size(); ++i) {
    os << i << "\thead=";
    if (tree.head[i] == kEps)
      os << "eps";
    else
      os << tree.head[i];
    os << "\tsib=";
    if (sib[i] == kZeta || tree.head[i] == kEps)
      os << "zeta";
    else
      os << sib[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace coref
