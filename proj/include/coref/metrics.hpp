#pragma once

#include <vector>

#include "coref/document.hpp"

namespace coref {

struct MetricResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Recall/precision numerators and denominators of one document; corpus
// scores sum these across documents (the reference scorer convention)
// instead of averaging per-document F1.
struct PrfParts {
  double rn = 0.0, rd = 0.0, pn = 0.0, pd = 0.0;

  PrfParts& operator+=(const PrfParts& o) {
    rn += o.rn;
    rd += o.rd;
    pn += o.pn;
    pd += o.pd;
    return *this;
  }
};

// Empty denominators yield 0 (empty key or response side).
MetricResult from_parts(const PrfParts& p);

// Link-based: recall = Σ_K (|K| - partitions of K induced by the response)
// over Σ_K (|K| - 1); mentions missing from the other side count as
// singleton parts. Precision swaps the roles.
PrfParts muc_parts(const std::vector<Cluster>& key, const std::vector<Cluster>& response);

// Mention-based: per-mention overlap ratios; mentions absent from the other
// side are treated as singletons there.
PrfParts b3_parts(const std::vector<Cluster>& key, const std::vector<Cluster>& response);

// Entity-alignment: optimal one-to-one cluster matching maximizing
// Σ φ4(K,R), φ4 = 2|K∩R| / (|K|+|R|); recall divides by the key cluster
// count, precision by the response cluster count.
PrfParts ceaf_phi4_parts(const std::vector<Cluster>& key, const std::vector<Cluster>& response);

// Exact-span mention detection over the unions of the two partitions.
PrfParts mention_parts(const std::vector<Cluster>& key, const std::vector<Cluster>& response);

MetricResult muc(const std::vector<Cluster>& key, const std::vector<Cluster>& response);
MetricResult b_cubed(const std::vector<Cluster>& key, const std::vector<Cluster>& response);
MetricResult ceaf_phi4(const std::vector<Cluster>& key, const std::vector<Cluster>& response);
MetricResult mention_detection_prf(const std::vector<Cluster>& key,
                                   const std::vector<Cluster>& response);

double avg_f1(const MetricResult& a, const MetricResult& b, const MetricResult& c);

// Maximum-total-similarity one-to-one assignment between rows and columns of
// `sim` (not necessarily square); O(n^3) potentials method. Returns the
// total; if `match` is given, match[r] = assigned column or -1.
double max_assignment(const Tensor& sim, std::vector<int>* match = nullptr);

// Summed-parts corpus aggregation for the three coreference metrics plus
// mention detection.
struct CorpusMetrics {
  PrfParts muc_p, b3_p, ceaf_p, mention_p;

  void add_document(const std::vector<Cluster>& key, const std::vector<Cluster>& response);
  MetricResult muc() const { return from_parts(muc_p); }
  MetricResult b_cubed() const { return from_parts(b3_p); }
  MetricResult ceaf_phi4() const { return from_parts(ceaf_p); }
  MetricResult mention_detection() const { return from_parts(mention_p); }
  double avg_f1() const;
};

// Table-style text report: P/R/F1 per metric plus the average F1.
std::string metrics_report(const CorpusMetrics& m);

}  // namespace coref
