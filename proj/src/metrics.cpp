#include "coref/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace coref {

namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

std::map<Span, int> cluster_index(const std::vector<Cluster>& clusters) {
  std::map<Span, int> idx;
  for (size_t c = 0; c < clusters.size(); ++c)
    for (const Span& s : clusters[c])
      require(idx.emplace(s, static_cast<int>(c)).second,
              "metrics: span appears in two clusters");
  return idx;
}

// numerator and denominator of the MUC recall with `from` as key side
void muc_side(const std::vector<Cluster>& from, const std::map<Span, int>& to_idx, double& num,
              double& den) {
  for (const Cluster& c : from) {
    std::set<int> parts;
    int missing = 0;
    for (const Span& s : c) {
      auto it = to_idx.find(s);
      if (it == to_idx.end())
        ++missing;
      else
        parts.insert(it->second);
    }
    num += static_cast<double>(c.size()) - static_cast<double>(parts.size() + missing);
    den += static_cast<double>(c.size()) - 1.0;
  }
}

// per-mention overlap sum of the B³ recall with `from` as key side
void b3_side(const std::vector<Cluster>& from, const std::map<Span, int>& to_idx, double& num,
             double& den) {
  for (const Cluster& c : from) {
    std::map<int, int> overlap;  // to-cluster -> |c ∩ to-cluster|
    int missing = 0;
    for (const Span& s : c) {
      auto it = to_idx.find(s);
      if (it == to_idx.end())
        ++missing;
      else
        ++overlap[it->second];
    }
    double cell = 0.0;
    for (const auto& [tc, n] : overlap) cell += static_cast<double>(n) * n;
    // each twinless mention sits in its own singleton on the other side
    cell += missing;
    num += cell / static_cast<double>(c.size());
    den += static_cast<double>(c.size());
  }
}

}  // namespace

MetricResult from_parts(const PrfParts& p) {
  MetricResult r;
  r.recall = safe_div(p.rn, p.rd);
  r.precision = safe_div(p.pn, p.pd);
  r.f1 = safe_div(2.0 * r.precision * r.recall, r.precision + r.recall);
  return r;
}

PrfParts muc_parts(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  const auto key_idx = cluster_index(key);
  const auto resp_idx = cluster_index(response);
  PrfParts p;
  muc_side(key, resp_idx, p.rn, p.rd);
  muc_side(response, key_idx, p.pn, p.pd);
  return p;
}

PrfParts b3_parts(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  const auto key_idx = cluster_index(key);
  const auto resp_idx = cluster_index(response);
  PrfParts p;
  b3_side(key, resp_idx, p.rn, p.rd);
  b3_side(response, key_idx, p.pn, p.pd);
  return p;
}

double max_assignment(const Tensor& sim, std::vector<int>* match) {
  const int rows = sim.rows(), cols = sim.cols();
  const int n = std::max(rows, cols);
  if (n == 0) {
    if (match) match->clear();
    return 0.0;
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // square minimization problem: cost = -similarity, dummies cost 0
  auto cost = [&](int r, int c) {
    return r < rows && c < cols ? -sim.at(r, c) : 0.0;
  };

  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  if (match) match->assign(rows, -1);
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    const int r = p[j] - 1, c = j - 1;
    if (r < rows && c < cols) {
      total += sim.at(r, c);
      if (match) (*match)[r] = c;
    }
  }
  return total;
}

PrfParts ceaf_phi4_parts(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  const int nk = static_cast<int>(key.size());
  const int nr = static_cast<int>(response.size());
  Tensor sim(std::max(nk, 1), std::max(nr, 1));
  const auto resp_idx = cluster_index(response);
  cluster_index(key);  // validates disjointness
  for (int k = 0; k < nk; ++k) {
    std::map<int, int> overlap;
    for (const Span& s : key[k]) {
      auto it = resp_idx.find(s);
      if (it != resp_idx.end()) ++overlap[it->second];
    }
    for (const auto& [r, n] : overlap)
      sim.at(k, r) = 2.0 * n / (static_cast<double>(key[k].size()) + response[r].size());
  }
  PrfParts p;
  p.rn = p.pn = (nk == 0 || nr == 0) ? 0.0 : max_assignment(sim);
  p.rd = nk;
  p.pd = nr;
  return p;
}

PrfParts mention_parts(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  std::set<Span> k, r;
  for (const Cluster& c : key) k.insert(c.begin(), c.end());
  for (const Cluster& c : response) r.insert(c.begin(), c.end());
  double both = 0.0;
  for (const Span& s : k) both += r.count(s);
  PrfParts p;
  p.rn = p.pn = both;
  p.rd = static_cast<double>(k.size());
  p.pd = static_cast<double>(r.size());
  return p;
}

MetricResult muc(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  return from_parts(muc_parts(key, response));
}
MetricResult b_cubed(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  return from_parts(b3_parts(key, response));
}
MetricResult ceaf_phi4(const std::vector<Cluster>& key, const std::vector<Cluster>& response) {
  return from_parts(ceaf_phi4_parts(key, response));
}
MetricResult mention_detection_prf(const std::vector<Cluster>& key,
                                   const std::vector<Cluster>& response) {
  return from_parts(mention_parts(key, response));
}

double avg_f1(const MetricResult& a, const MetricResult& b, const MetricResult& c) {
  return (a.f1 + b.f1 + c.f1) / 3.0;
}

void CorpusMetrics::add_document(const std::vector<Cluster>& key,
                                 const std::vector<Cluster>& response) {
  muc_p += muc_parts(key, response);
  b3_p += b3_parts(key, response);
  ceaf_p += ceaf_phi4_parts(key, response);
  mention_p += mention_parts(key, response);
}

double CorpusMetrics::avg_f1() const { return coref::avg_f1(muc(), b_cubed(), ceaf_phi4()); }

std::string metrics_report(const CorpusMetrics& m) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  auto line = [&](const char* name, const MetricResult& r) {
    os << name << "\tP " << 100.0 * r.precision << "\tR " << 100.0 * r.recall << "\tF1 "
       << 100.0 * r.f1 << "\n";
  };
  line("MUC", m.muc());
  line("B3", m.b_cubed());
  line("CEAFphi4", m.ceaf_phi4());
  line("Mention", m.mention_detection());
  os << "AvgF1\t" << 100.0 * m.avg_f1() << "\n";
  return os.str();
}

}  // namespace coref
