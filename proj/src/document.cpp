#include "coref/document.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace coref {

using nlohmann::json;

std::vector<Cluster> canonicalize_clusters(std::vector<Cluster> clusters, int n_tokens,
                                           int min_cluster_size) {
  for (Cluster& c : clusters) {
    for (const Span& s : c) {
      require(s.start >= 0 && s.start <= s.end, "cluster span has start > end or negative start");
      require(s.end < n_tokens, "cluster span extends beyond the document");
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    require(static_cast<int>(c.size()) >= min_cluster_size, "cluster smaller than allowed");
  }
  std::sort(clusters.begin(), clusters.end());
  std::set<Span> seen;
  for (const Cluster& c : clusters)
    for (const Span& s : c)
      require(seen.insert(s).second, "identical span in two clusters");
  return clusters;
}

namespace {

json cluster_json(const std::vector<Cluster>& clusters) {
  json out = json::array();
  for (const Cluster& c : clusters) {
    json jc = json::array();
    for (const Span& s : c) jc.push_back(json::array({s.start, s.end}));
    out.push_back(std::move(jc));
  }
  return out;
}

std::vector<Cluster> clusters_from_json(const json& j) {
  require(j.is_array(), "jsonl: clusters must be an array");
  std::vector<Cluster> out;
  for (const json& jc : j) {
    require(jc.is_array(), "jsonl: cluster must be an array of spans");
    Cluster c;
    for (const json& js : jc) {
      require(js.is_array() && js.size() == 2 && js[0].is_number_integer() &&
                  js[1].is_number_integer(),
              "jsonl: span must be [start, end]");
      c.push_back(Span{js[0].get<int>(), js[1].get<int>()});
    }
    out.push_back(std::move(c));
  }
  return out;
}

json parse_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  require(!j.is_discarded() && j.is_object(), "jsonl: line is not a JSON object");
  return j;
}

void validate_sentences(const std::vector<int>& starts, int n_tokens) {
  if (n_tokens == 0) {
    require(starts.empty(), "jsonl: sentences given for an empty document");
    return;
  }
  require(!starts.empty() && starts.front() == 0, "jsonl: first sentence must start at 0");
  for (size_t i = 0; i < starts.size(); ++i) {
    require(starts[i] >= 0 && starts[i] < n_tokens, "jsonl: sentence start out of range");
    if (i) require(starts[i] > starts[i - 1], "jsonl: sentence starts must increase");
  }
}

}  // namespace

Document parse_jsonl_document(const std::string& line) {
  json j = parse_line(line);
  Document doc;
  require(j.contains("tokens") && j["tokens"].is_array(), "jsonl: missing tokens array");
  for (const json& t : j["tokens"]) {
    require(t.is_string(), "jsonl: tokens must be strings");
    doc.tokens.push_back(t.get<std::string>());
  }
  require(!doc.tokens.empty(), "jsonl: document has no tokens");
  const int n = static_cast<int>(doc.tokens.size());

  if (j.contains("doc_id")) {
    require(j["doc_id"].is_string(), "jsonl: doc_id must be a string");
    doc.doc_id = j["doc_id"].get<std::string>();
  }
  if (j.contains("sentences")) {
    require(j["sentences"].is_array(), "jsonl: sentences must be an array");
    for (const json& s : j["sentences"]) {
      require(s.is_number_integer(), "jsonl: sentence starts must be integers");
      doc.sentence_starts.push_back(s.get<int>());
    }
  } else {
    doc.sentence_starts = {0};
  }
  validate_sentences(doc.sentence_starts, n);

  if (j.contains("speakers")) {
    require(j["speakers"].is_array(), "jsonl: speakers must be an array");
    for (const json& s : j["speakers"]) {
      require(s.is_string(), "jsonl: speakers must be strings");
      doc.speakers.push_back(s.get<std::string>());
    }
    require(static_cast<int>(doc.speakers.size()) == n, "jsonl: one speaker per token required");
  } else {
    doc.speakers.assign(n, "");
  }

  if (j.contains("genre")) {
    require(j["genre"].is_number_integer() && j["genre"].get<int>() >= 0,
            "jsonl: genre must be a non-negative integer");
    doc.genre = j["genre"].get<int>();
  }

  if (j.contains("clusters"))
    doc.gold_clusters = canonicalize_clusters(clusters_from_json(j["clusters"]), n, 2);
  return doc;
}

std::string serialize_jsonl_document(const Document& doc) {
  json j;
  j["doc_id"] = doc.doc_id;
  j["tokens"] = doc.tokens;
  j["sentences"] = doc.sentence_starts;
  j["speakers"] = doc.speakers;
  j["genre"] = doc.genre;
  j["clusters"] =
      cluster_json(canonicalize_clusters(doc.gold_clusters, static_cast<int>(doc.tokens.size()), 2));
  return j.dump();
}

std::vector<Document> load_jsonl_corpus(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "cannot open corpus: " + path);
  std::vector<Document> docs;
  std::string line;
  while (std::getline(f, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    docs.push_back(parse_jsonl_document(line));
  }
  return docs;
}

void save_jsonl_corpus(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream f(path, std::ios::trunc);
  require(f.good(), "cannot open for writing: " + path);
  for (const Document& d : docs) f << serialize_jsonl_document(d) << "\n";
  require(f.good(), "write failed: " + path);
}

std::string serialize_prediction(const std::string& doc_id, const std::vector<Cluster>& clusters) {
  json j;
  j["doc_id"] = doc_id;
  std::vector<Cluster> canon = clusters;
  for (Cluster& c : canon) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  std::sort(canon.begin(), canon.end());
  j["clusters"] = cluster_json(canon);
  return j.dump();
}

std::pair<std::string, std::vector<Cluster>> parse_prediction(const std::string& line) {
  json j = parse_line(line);
  require(j.contains("doc_id") && j["doc_id"].is_string(), "prediction: missing doc_id");
  require(j.contains("clusters"), "prediction: missing clusters");
  std::vector<Cluster> clusters = clusters_from_json(j["clusters"]);
  for (Cluster& c : clusters) {
    for (const Span& s : c)
      require(s.start >= 0 && s.start <= s.end, "prediction: bad span");
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    require(!c.empty(), "prediction: empty cluster");
  }
  std::sort(clusters.begin(), clusters.end());
  return {j["doc_id"].get<std::string>(), clusters};
}

int genre_from_doc_id(const std::string& doc_id) {
  static const std::vector<std::string> genres = {"bc", "bn", "mz", "nw", "pt", "tc", "wb"};
  const std::string prefix = doc_id.substr(0, doc_id.find('/'));
  for (size_t i = 0; i < genres.size(); ++i)
    if (prefix == genres[i]) return static_cast<int>(i);
  return 0;
}

int genre_count() { return 7; }

namespace {

struct ConllPart {
  std::string base_id;
  std::string part;
  std::vector<std::string> tokens;
  std::vector<std::string> speakers;
  std::vector<int> sentence_starts;
  // cluster id -> open starts (stack) and finished spans
  std::map<int, std::vector<int>> open;
  std::map<int, std::vector<Span>> spans;
  int expected_cols = -1;
  bool sentence_open = false;

  void bracket_items(const std::string& field, int token_idx) {
    if (field == "-" || field == "_") return;
    std::stringstream ss(field);
    std::string item;
    while (std::getline(ss, item, '|')) {
      require(!item.empty(), "conll: empty coref item");
      const bool opens = item.front() == '(';
      const bool closes = item.back() == ')';
      std::string digits = item.substr(opens ? 1 : 0,
                                       item.size() - (opens ? 1 : 0) - (closes ? 1 : 0));
      require(!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos,
              "conll: malformed coref item: " + item);
      const int id = std::stoi(digits);
      if (opens) open[id].push_back(token_idx);
      if (closes) {
        auto it = open.find(id);
        require(it != open.end() && !it->second.empty(),
                "conll: close without open for cluster " + digits);
        spans[id].push_back(Span{it->second.back(), token_idx});
        it->second.pop_back();
      }
    }
  }

  Document finish() {
    for (const auto& [id, stack] : open)
      require(stack.empty(), "conll: unclosed bracket for cluster " + std::to_string(id));
    Document doc;
    doc.doc_id = base_id + "_" + part;
    doc.tokens = tokens;
    doc.speakers = speakers;
    doc.sentence_starts = sentence_starts;
    doc.genre = genre_from_doc_id(base_id);
    std::vector<Cluster> clusters;
    for (auto& [id, sp] : spans) {
      std::sort(sp.begin(), sp.end());
      sp.erase(std::unique(sp.begin(), sp.end()), sp.end());
      if (sp.size() >= 2) clusters.push_back(sp);
    }
    doc.gold_clusters =
        canonicalize_clusters(std::move(clusters), static_cast<int>(doc.tokens.size()), 2);
    return doc;
  }
};

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> cols;
  std::stringstream ss(line);
  std::string c;
  while (ss >> c) cols.push_back(c);
  return cols;
}

}  // namespace

std::vector<Document> parse_conll_skeleton(const std::string& text) {
  std::vector<Document> docs;
  std::istringstream in(text);
  std::string line;
  ConllPart part;
  bool in_doc = false;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("#begin document", 0) == 0) {
      require(!in_doc, "conll: nested #begin document");
      in_doc = true;
      part = ConllPart{};
      continue;
    }
    if (line.rfind("#end document", 0) == 0) {
      require(in_doc, "conll: #end document without #begin");
      if (!part.tokens.empty()) docs.push_back(part.finish());
      in_doc = false;
      continue;
    }
    if (!in_doc) {
      require(line.find_first_not_of(" \t") == std::string::npos,
              "conll: content outside document block");
      continue;
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      part.sentence_open = false;
      continue;
    }
    if (line[0] == '#') continue;

    std::vector<std::string> cols = split_ws(line);
    const int n = static_cast<int>(cols.size());
    require(n == 6 || n >= 10, "conll: unsupported column count " + std::to_string(n));
    if (part.expected_cols == -1) part.expected_cols = n;
    require(n == part.expected_cols, "conll: inconsistent column count");

    const std::string& doc_col = cols[0];
    const std::string& part_col = cols[1];
    if (part.tokens.empty()) {
      part.base_id = doc_col;
      part.part = part_col;
    } else {
      require(doc_col == part.base_id && part_col == part.part,
              "conll: doc id or part changed mid-block");
    }

    const int token_idx = static_cast<int>(part.tokens.size());
    if (!part.sentence_open) {
      part.sentence_starts.push_back(token_idx);
      part.sentence_open = true;
    }
    const int word_in_sentence = token_idx - part.sentence_starts.back();
    require(std::stoi(cols[2]) == word_in_sentence, "conll: word index out of sequence");

    part.tokens.push_back(cols[3]);
    part.speakers.push_back(n == 6 ? cols[4] : cols[9]);
    part.bracket_items(cols[n - 1], token_idx);
  }
  require(!in_doc, "conll: missing #end document");
  return docs;
}

std::vector<Document> load_conll_file(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "cannot open conll file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_conll_skeleton(ss.str());
}

GoldAnnotation gold_antecedent_sets(const Document& doc, const std::vector<Span>& retained,
                                    const std::vector<std::vector<int>>& candidates) {
  std::map<Span, int> cluster_of;
  for (size_t c = 0; c < doc.gold_clusters.size(); ++c)
    for (const Span& s : doc.gold_clusters[c]) cluster_of[s] = static_cast<int>(c);

  GoldAnnotation ann;
  ann.antecedents.resize(retained.size());
  for (size_t i = 0; i < retained.size(); ++i) {
    auto it = cluster_of.find(retained[i]);
    if (it == cluster_of.end()) continue;
    for (int j : candidates[i]) {
      auto jt = cluster_of.find(retained[j]);
      if (jt != cluster_of.end() && jt->second == it->second)
        ann.antecedents[i].push_back(j);
    }
  }
  return ann;
}

}  // namespace coref
