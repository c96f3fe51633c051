#pragma once

#include <string>
#include <vector>

#include "coref/tensor.hpp"

namespace coref {

// Token span, inclusive on both ends.
struct Span {
  int start = 0;
  int end = 0;

  int width() const { return end - start + 1; }
  bool operator==(const Span& o) const = default;
  auto operator<=>(const Span& o) const = default;
};

using Cluster = std::vector<Span>;

struct Document {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<int> sentence_starts;  // first entry 0 when tokens exist
  std::vector<std::string> speakers; // one per token
  int genre = 0;
  std::vector<Cluster> gold_clusters;
};

// For each retained span, the positions (into the retained-span array) of
// its gold antecedents among its candidates; empty means the dummy.
struct GoldAnnotation {
  std::vector<std::vector<int>> antecedents;
};

// JSONL: one object per line. "tokens" is required; doc_id, sentences,
// speakers, genre and clusters default to empty/zero when absent. Clusters
// are canonicalized (spans sorted and deduped, clusters ordered by first
// span); a span appearing in two clusters or a cluster with fewer than two
// distinct spans is an error.
Document parse_jsonl_document(const std::string& line);
std::string serialize_jsonl_document(const Document& doc);
std::vector<Document> load_jsonl_corpus(const std::string& path);
void save_jsonl_corpus(const std::string& path, const std::vector<Document>& docs);

// Prediction lines carry only {doc_id, clusters}; singleton clusters are
// accepted here since responses are not held to gold invariants.
std::string serialize_prediction(const std::string& doc_id, const std::vector<Cluster>& clusters);
std::pair<std::string, std::vector<Cluster>> parse_prediction(const std::string& line);

// CoNLL-2012 skeleton: "#begin document" / "#end document" blocks, one part
// per Document. Lines have 6 columns (doc id, part, word index, word,
// speaker, coref) or the full layout with >= 10 columns (speaker at column
// 9, coref last). Clusters come from bracket matching in the final column;
// nested brackets of one id close innermost-first. Singleton clusters are
// dropped after the scan.
std::vector<Document> parse_conll_skeleton(const std::string& text);
std::vector<Document> load_conll_file(const std::string& path);

// 7-genre CoNLL convention, from the doc id up to the first '/'.
// bc bn mz nw pt tc wb -> 0..6; anything else -> 0.
int genre_from_doc_id(const std::string& doc_id);
int genre_count();

// Sorts spans inside each cluster, dedupes, orders clusters by first span,
// and checks the gold invariants (spans in range, no span in two clusters,
// min_cluster_size distinct spans per cluster).
std::vector<Cluster> canonicalize_clusters(std::vector<Cluster> clusters, int n_tokens,
                                           int min_cluster_size);

// GOLD(i): candidates of i that share i's gold cluster. Spans are matched
// exactly; retained spans outside every gold cluster get the empty set.
GoldAnnotation gold_antecedent_sets(const Document& doc, const std::vector<Span>& retained,
                                    const std::vector<std::vector<int>>& candidates);

}  // namespace coref
