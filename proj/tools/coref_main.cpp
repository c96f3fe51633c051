#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "coref/checkpoint.hpp"
#include "coref/config.hpp"
#include "coref/kernels.hpp"
#include "coref/oracles.hpp"
#include "coref/trainer.hpp"
#include "json.hpp"

namespace coref {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitOracle = 1;
constexpr int kExitUnreadable = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitCheckpoint = 4;
constexpr int kExitDocIds = 5;

void print_usage() {
  std::cout << "usage: coref <command> [--config=FILE] [--key=value ...]\n"
            << "\n"
            << "commands:\n"
            << "  train         fit a model on `corpus`; writes `checkpoint` and a\n"
            << "                per-epoch JSON log to `log` (stdout when unset)\n"
            << "  predict       decode `corpus` with `checkpoint`; writes prediction\n"
            << "                JSONL to `output` (stdout when unset)\n"
            << "  evaluate      score `predictions` against `gold`; text report plus\n"
            << "                JSON (written to `output` when set)\n"
            << "  score         predict with `checkpoint` and evaluate against the\n"
            << "                gold clusters carried by `corpus`\n"
            << "  oracle-check  randomized decoder-vs-brute-force and gradient-vs-\n"
            << "                finite-difference suites under `seed`\n"
            << "\n"
            << "Corpora are JSONL (one document per line) or CoNLL skeletons when the\n"
            << "path ends in .conll / .v4_gold_conll. Flags override config-file keys.\n"
            << "\n"
            << "keys and defaults:\n"
            << dump_config(RunConfig{})
            << "\n"
            << "exit codes: 0 success; 1 oracle mismatch; 2 unreadable input or bad\n"
            << "usage; 3 training divergence; 4 checkpoint format/shape mismatch;\n"
            << "5 doc_id mismatch between predictions and gold\n";
}

bool conll_path(const std::string& path) {
  return path.size() >= 6 && path.compare(path.size() - 6, 6, ".conll") == 0;
}

std::vector<Document> load_corpus(const std::string& what, const std::string& path) {
  require(!path.empty(), what + ": path required");
  return conll_path(path) ? load_conll_file(path) : load_jsonl_corpus(path);
}

EmbeddingProvider load_embeddings(const RunConfig& rc) {
  if (rc.embeddings.empty())
    return EmbeddingProvider::synthetic(rc.model.enc.d_emb, rc.seed);
  return EmbeddingProvider::from_file(rc.embeddings);
}

ParamStore restore_params(const RunConfig& rc) {
  require(!rc.checkpoint.empty(), "checkpoint: path required");
  ParamStore ps;
  Rng rng(rc.seed);
  register_model_params(ps, rc.model, rng);
  try {
    ps.load(rc.checkpoint);
  } catch (const CheckpointVersionError&) {
    throw;
  } catch (const CorefError& e) {
    const std::string msg = e.what();
    if (msg.find("cannot open") != std::string::npos) throw;
    // structural mismatch against the configured model counts as a
    // checkpoint mismatch, not an unreadable input
    throw CheckpointVersionError(msg);
  }
  return ps;
}

nlohmann::json metric_json(const MetricResult& r) {
  return {{"recall", r.recall}, {"precision", r.precision}, {"f1", r.f1}};
}

nlohmann::json report_json(const CorpusMetrics& m) {
  return {{"muc", metric_json(m.muc())},
          {"b_cubed", metric_json(m.b_cubed())},
          {"ceaf_phi4", metric_json(m.ceaf_phi4())},
          {"mention", metric_json(m.mention_detection())},
          {"avg_f1", m.avg_f1()}};
}

void emit_report(const RunConfig& rc, const CorpusMetrics& m) {
  std::cout << metrics_report(m);
  const std::string js = report_json(m).dump();
  if (rc.output.empty()) {
    std::cout << js << "\n";
  } else {
    std::ofstream f(rc.output);
    require(f.good(), "cannot open for writing: " + rc.output);
    f << js << "\n";
  }
}

int cmd_train(const RunConfig& rc) {
  const std::vector<Document> train_docs = load_corpus("train corpus", rc.corpus);
  std::vector<Document> dev_docs;
  if (!rc.dev.empty()) dev_docs = load_corpus("dev corpus", rc.dev);
  const EmbeddingProvider emb = load_embeddings(rc);

  ParamStore ps;
  Rng rng(rc.seed);
  register_model_params(ps, rc.model, rng);
  const TrainResult r = train_model(ps, rc.model, rc.train, emb, train_docs, dev_docs);

  if (!rc.checkpoint.empty()) ps.save(rc.checkpoint);
  if (rc.log.empty()) {
    for (const std::string& line : r.epoch_log) std::cout << line << "\n";
  } else {
    std::ofstream f(rc.log);
    require(f.good(), "cannot open for writing: " + rc.log);
    for (const std::string& line : r.epoch_log) f << line << "\n";
  }
  std::cout << "train: " << train_docs.size() << " documents, " << r.epoch_log.size()
            << " epochs, final train avg F1 " << r.train_avg_f1;
  if (!dev_docs.empty()) std::cout << ", dev avg F1 " << r.dev_avg_f1;
  std::cout << "\n";
  return kExitOk;
}

int cmd_predict(const RunConfig& rc) {
  const ParamStore ps = restore_params(rc);
  const std::vector<Document> docs = load_corpus("corpus", rc.corpus);
  const EmbeddingProvider emb = load_embeddings(rc);

  std::ofstream file;
  if (!rc.output.empty()) {
    file.open(rc.output);
    require(file.good(), "cannot open for writing: " + rc.output);
  }
  std::ostream& out = rc.output.empty() ? std::cout : file;
  for (const Document& doc : docs)
    out << serialize_prediction(doc.doc_id, predict_clusters(ps, rc.model, emb, doc)) << "\n";
  return kExitOk;
}

int cmd_evaluate(const RunConfig& rc) {
  const std::vector<Document> gold = load_corpus("gold", rc.gold);
  require(!rc.predictions.empty(), "predictions: path required");
  std::ifstream f(rc.predictions);
  require(f.good(), "cannot open predictions: " + rc.predictions);

  std::map<std::string, std::vector<Cluster>> by_id;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto [id, clusters] = parse_prediction(line);
    require(by_id.emplace(id, std::move(clusters)).second,
            "predictions: duplicate doc_id: " + id);
  }

  CorpusMetrics m;
  for (const Document& doc : gold) {
    auto it = by_id.find(doc.doc_id);
    if (it == by_id.end()) {
      std::cerr << "evaluate: no prediction for document " << doc.doc_id << "\n";
      return kExitDocIds;
    }
    m.add_document(doc.gold_clusters, it->second);
    by_id.erase(it);
  }
  if (!by_id.empty()) {
    std::cerr << "evaluate: prediction for unknown document " << by_id.begin()->first << "\n";
    return kExitDocIds;
  }
  emit_report(rc, m);
  return kExitOk;
}

int cmd_score(const RunConfig& rc) {
  const ParamStore ps = restore_params(rc);
  const std::vector<Document> docs = load_corpus("corpus", rc.corpus);
  const EmbeddingProvider emb = load_embeddings(rc);

  std::ofstream file;
  if (!rc.predictions.empty()) {
    file.open(rc.predictions);
    require(file.good(), "cannot open for writing: " + rc.predictions);
  }
  CorpusMetrics m;
  for (const Document& doc : docs) {
    const std::vector<Cluster> clusters = predict_clusters(ps, rc.model, emb, doc);
    if (file.is_open()) file << serialize_prediction(doc.doc_id, clusters) << "\n";
    m.add_document(doc.gold_clusters, clusters);
  }
  emit_report(rc, m);
  return kExitOk;
}

int cmd_oracle_check(const RunConfig& rc) {
  const SuiteReport dec = decoder_oracle_suite(rc.seed, 200, 7);
  std::cout << format_report(dec);
  const SuiteReport grad = gradient_oracle_suite(rc.seed, 100);
  std::cout << format_report(grad);
  return dec.ok() && grad.ok() ? kExitOk : kExitOracle;
}

int run(std::vector<std::string> args) {
  if (args.empty()) {
    print_usage();
    return kExitUnreadable;
  }
  const std::string cmd = args.front();
  args.erase(args.begin());
  if (cmd == "help" || cmd == "--help" || cmd == "-h") {
    print_usage();
    return kExitOk;
  }

  try {
    const RunConfig rc = parse_run_config(args);
    kern::set_threads(rc.jobs);
    if (cmd == "train") return cmd_train(rc);
    if (cmd == "predict") return cmd_predict(rc);
    if (cmd == "evaluate") return cmd_evaluate(rc);
    if (cmd == "score") return cmd_score(rc);
    if (cmd == "oracle-check") return cmd_oracle_check(rc);
    std::cerr << "unknown command: " << cmd << "\n";
    print_usage();
    return kExitUnreadable;
  } catch (const CheckpointVersionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckpoint;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const CorefError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnreadable;
  }
}

}  // namespace
}  // namespace coref

int main(int argc, char** argv) {
  return coref::run(std::vector<std::string>(argv + 1, argv + argc));
}
