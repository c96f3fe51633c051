#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coref/document.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support/synth.hpp"

using namespace coref;
using coref::testing::string_match_corpus;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

int run_cli(const std::string& args, std::string* out = nullptr) {
  const std::string cmd =
      std::string(COREF_CLI_PATH) + " " + args + " > cli_test_out.txt 2> cli_test_err.txt";
  const int status = std::system(cmd.c_str());
  if (out) *out = slurp("cli_test_out.txt");
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

// small everywhere: the CLI tests exercise plumbing, not learning
const char* kTiny =
    "--enc.d_emb=6 --enc.d_lstm=5 --enc.d_width=3 --cand.max_width=2 "
    "--cand.spans_ratio=2 --cand.top_k=10 --scorer.hidden=8 --scorer.feat_dim=4 "
    "--train.epochs=3 --train.lr=0.003 --train.sib_cap=4";

std::string fixture_corpus(const char* name, int docs, uint64_t seed, bool add_tiny = false) {
  std::vector<Document> corpus = string_match_corpus(docs, seed);
  if (add_tiny) {
    // one filler token: nothing corefers, so prediction must be empty
    Document tiny;
    tiny.doc_id = "tiny_doc";
    tiny.tokens = {"hm"};
    tiny.sentence_starts = {0};
    tiny.speakers = {"s"};
    corpus.push_back(tiny);
  }
  const std::string path = std::string("cli_test_") + name + ".jsonl";
  save_jsonl_corpus(path, corpus);
  return path;
}

}  // namespace

TEST_CASE("usage and argument errors") {
  std::string out;
  CHECK(run_cli("help", &out) == 0);
  CHECK(out.find("train") != std::string::npos);
  CHECK(out.find("oracle-check") != std::string::npos);
  CHECK(out.find("exit codes") != std::string::npos);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("train --no.such.key=1") == 2);
  CHECK(run_cli("train --corpus=cli_test_absent.jsonl") == 2);
  CHECK(run_cli("evaluate --gold=cli_test_absent.jsonl --predictions=x") == 2);
}

TEST_CASE("train writes a checkpoint and a JSON epoch log, deterministically") {
  const std::string corpus = fixture_corpus("train", 6, 301);
  const std::string base = std::string(kTiny) + " --corpus=" + corpus + " --seed=11";

  CHECK(run_cli("train " + base + " --checkpoint=cli_test_a.ckpt --log=cli_test_a.log") == 0);
  CHECK(run_cli("train " + base + " --checkpoint=cli_test_b.ckpt --log=cli_test_b.log") == 0);

  const std::string log = slurp("cli_test_a.log");
  CHECK(log == slurp("cli_test_b.log"));
  CHECK(slurp("cli_test_a.ckpt") == slurp("cli_test_b.ckpt"));
  CHECK(!slurp("cli_test_a.ckpt").empty());

  std::istringstream is(log);
  std::string line;
  int epochs = 0;
  while (std::getline(is, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["epoch"] == epochs);
    CHECK(j.contains("train_loss"));
    ++epochs;
  }
  CHECK(epochs == 3);
}

TEST_CASE("predict emits one parseable line per document") {
  const std::string corpus = fixture_corpus("pred", 4, 307, /*add_tiny=*/true);
  const std::string base = std::string(kTiny) + " --corpus=" + corpus + " --seed=13";
  REQUIRE(run_cli("train " + base + " --checkpoint=cli_test_p.ckpt --log=cli_test_p.log") == 0);

  CHECK(run_cli("predict " + base +
                " --checkpoint=cli_test_p.ckpt --output=cli_test_p.jsonl") == 0);
  std::ifstream f("cli_test_p.jsonl");
  const std::vector<Document> docs = load_jsonl_corpus(corpus);
  std::string line;
  size_t n = 0;
  while (std::getline(f, line)) {
    auto [id, clusters] = parse_prediction(line);
    REQUIRE(n < docs.size());
    CHECK(id == docs[n].doc_id);
    if (id == "tiny_doc") CHECK(clusters.empty());
    for (const Cluster& c : clusters) CHECK(c.size() >= 2);
    ++n;
  }
  CHECK(n == docs.size());
}

TEST_CASE("greedy and second-order decoding agree on gamma=1 checkpoints") {
  const std::string corpus = fixture_corpus("g1", 4, 311);
  const std::string base = std::string(kTiny) + " --corpus=" + corpus +
                           " --seed=17 --decode.gamma=1 --checkpoint=cli_test_g1.ckpt";
  REQUIRE(run_cli("train " + base + " --log=cli_test_g1.log") == 0);
  CHECK(run_cli("predict " + base + " --decode.mode=greedy --output=cli_test_g1_greedy.jsonl") ==
        0);
  CHECK(run_cli("predict " + base +
                " --decode.mode=second-order --output=cli_test_g1_second.jsonl") == 0);
  const std::string a = slurp("cli_test_g1_greedy.jsonl");
  CHECK(a == slurp("cli_test_g1_second.jsonl"));
  CHECK(!a.empty());
}

TEST_CASE("evaluate reproduces the canonical fixture numbers") {
  Document doc;
  doc.doc_id = "canon";
  doc.tokens = {"a", "b", "c"};
  doc.sentence_starts = {0};
  doc.speakers = {"s", "s", "s"};
  doc.gold_clusters = {{Span{0, 0}, Span{1, 1}, Span{2, 2}}};
  save_jsonl_corpus("cli_test_gold.jsonl", {doc});
  {
    std::ofstream f("cli_test_resp.jsonl");
    f << serialize_prediction("canon", {{Span{0, 0}, Span{1, 1}}, {Span{2, 2}}}) << "\n";
  }

  std::string out;
  CHECK(run_cli("evaluate --gold=cli_test_gold.jsonl --predictions=cli_test_resp.jsonl"
                " --output=cli_test_eval.json",
                &out) == 0);
  CHECK(out.find("MUC") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp("cli_test_eval.json"));
  CHECK(double(j["muc"]["f1"]) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(double(j["b_cubed"]["f1"]) == doctest::Approx(5.0 / 7.0).epsilon(1e-9));
  CHECK(double(j["ceaf_phi4"]["f1"]) == doctest::Approx(0.5333).epsilon(1e-3));

  // identical files score 1.0 across the board
  {
    std::ofstream f("cli_test_resp_eq.jsonl");
    f << serialize_prediction("canon", doc.gold_clusters) << "\n";
  }
  CHECK(run_cli("evaluate --gold=cli_test_gold.jsonl --predictions=cli_test_resp_eq.jsonl"
                " --output=cli_test_eval_eq.json") == 0);
  const auto je = nlohmann::json::parse(slurp("cli_test_eval_eq.json"));
  CHECK(double(je["avg_f1"]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("doc_id mismatches exit with code 5") {
  const std::string gold = fixture_corpus("ev5", 2, 313);
  const std::vector<Document> docs = load_jsonl_corpus(gold);
  {
    std::ofstream f("cli_test_miss.jsonl");  // only the first document
    f << serialize_prediction(docs[0].doc_id, {}) << "\n";
  }
  CHECK(run_cli("evaluate --gold=" + gold + " --predictions=cli_test_miss.jsonl") == 5);
  {
    std::ofstream f("cli_test_extra.jsonl");
    for (const Document& d : docs) f << serialize_prediction(d.doc_id, {}) << "\n";
    f << serialize_prediction("phantom", {}) << "\n";
  }
  CHECK(run_cli("evaluate --gold=" + gold + " --predictions=cli_test_extra.jsonl") == 5);
}

TEST_CASE("checkpoint mismatches exit with code 4") {
  const std::string corpus = fixture_corpus("ck", 2, 331);
  const std::string base = std::string(kTiny) + " --corpus=" + corpus + " --seed=19";
  REQUIRE(run_cli("train " + base + " --checkpoint=cli_test_ck.ckpt --log=cli_test_ck.log") ==
          0);

  // shape mismatch: decode with a different lstm width
  std::string mismatch = base;
  const std::string from = "--enc.d_lstm=5";
  mismatch.replace(mismatch.find(from), from.size(), "--enc.d_lstm=4");
  CHECK(run_cli("predict " + mismatch + " --checkpoint=cli_test_ck.ckpt") == 4);

  // unsupported container version
  {
    std::ofstream f("cli_test_badver.ckpt", std::ios::binary);
    const unsigned char bytes[] = {0xe7, 0x03, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
    f.write(reinterpret_cast<const char*>(bytes), sizeof(bytes));
  }
  CHECK(run_cli("predict " + base + " --checkpoint=cli_test_badver.ckpt") == 4);

  // absent checkpoint is an unreadable input, not a version problem
  CHECK(run_cli("predict " + base + " --checkpoint=cli_test_absent.ckpt") == 2);
}

TEST_CASE("training divergence exits with code 3") {
  const std::string corpus = fixture_corpus("div", 2, 337);
  {
    // product features square the inputs, so 1e200 embeddings overflow
    std::ofstream f("cli_test_huge.emb");
    for (const char* w : {"alice", "bob", "carol", "dave", "erin", "frank", "grace", "heidi"})
      f << w << " 1e200 1e200 1e200 1e200 1e200 1e200\n";
  }
  const std::string base = std::string(kTiny) + " --corpus=" + corpus + " --seed=23";
  CHECK(run_cli("train " + base + " --embeddings=cli_test_huge.emb --log=cli_test_div.log") ==
        3);
}

TEST_CASE("score runs the checkpoint against the corpus gold") {
  const std::string corpus = fixture_corpus("sc", 4, 347);
  const std::string base = std::string(kTiny) + " --corpus=" + corpus + " --seed=29";
  REQUIRE(run_cli("train " + base + " --checkpoint=cli_test_sc.ckpt --log=cli_test_sc.log") ==
          0);
  std::string out;
  CHECK(run_cli("score " + base +
                " --checkpoint=cli_test_sc.ckpt --predictions=cli_test_sc.jsonl"
                " --output=cli_test_sc.json",
                &out) == 0);
  CHECK(out.find("AvgF1") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp("cli_test_sc.json"));
  CHECK(double(j["avg_f1"]) >= 0.0);
  CHECK(double(j["avg_f1"]) <= 1.0);
  std::ifstream preds("cli_test_sc.jsonl");
  std::string line;
  int n = 0;
  while (std::getline(preds, line)) {
    parse_prediction(line);
    ++n;
  }
  CHECK(n == 4);
}
