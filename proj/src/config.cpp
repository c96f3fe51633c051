#include "coref/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace coref {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int to_int(const std::string& key, const std::string& v) {
  size_t pos = 0;
  int x = 0;
  try {
    x = std::stoi(v, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  require(pos == v.size() && !v.empty(), "config: " + key + " needs an integer, got '" + v + "'");
  return x;
}

uint64_t to_u64(const std::string& key, const std::string& v) {
  size_t pos = 0;
  unsigned long long x = 0;
  try {
    x = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  require(pos == v.size() && !v.empty(),
          "config: " + key + " needs a non-negative integer, got '" + v + "'");
  return x;
}

double to_double(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  require(pos == v.size() && !v.empty(), "config: " + key + " needs a number, got '" + v + "'");
  return x;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"corpus", [](RunConfig& rc, const std::string&, const std::string& v) { rc.corpus = v; }},
      {"dev", [](RunConfig& rc, const std::string&, const std::string& v) { rc.dev = v; }},
      {"embeddings",
       [](RunConfig& rc, const std::string&, const std::string& v) { rc.embeddings = v; }},
      {"checkpoint",
       [](RunConfig& rc, const std::string&, const std::string& v) { rc.checkpoint = v; }},
      {"output", [](RunConfig& rc, const std::string&, const std::string& v) { rc.output = v; }},
      {"predictions",
       [](RunConfig& rc, const std::string&, const std::string& v) { rc.predictions = v; }},
      {"gold", [](RunConfig& rc, const std::string&, const std::string& v) { rc.gold = v; }},
      {"log", [](RunConfig& rc, const std::string&, const std::string& v) { rc.log = v; }},
      {"seed",
       [](RunConfig& rc, const std::string& k, const std::string& v) {
         rc.seed = to_u64(k, v);
         rc.train.seed = rc.seed;
       }},
      {"jobs",
       [](RunConfig& rc, const std::string& k, const std::string& v) { rc.jobs = to_int(k, v); }},
      {"enc.d_emb", [](RunConfig& rc, const std::string& k,
                       const std::string& v) { rc.model.enc.d_emb = to_int(k, v); }},
      {"enc.d_lstm", [](RunConfig& rc, const std::string& k,
                        const std::string& v) { rc.model.enc.d_lstm = to_int(k, v); }},
      {"enc.d_width", [](RunConfig& rc, const std::string& k,
                         const std::string& v) { rc.model.enc.d_width = to_int(k, v); }},
      {"cand.max_width", [](RunConfig& rc, const std::string& k,
                            const std::string& v) { rc.model.cand.max_width = to_int(k, v); }},
      {"cand.spans_ratio",
       [](RunConfig& rc, const std::string& k, const std::string& v) {
         rc.model.cand.spans_ratio = to_double(k, v);
       }},
      {"cand.top_k", [](RunConfig& rc, const std::string& k,
                        const std::string& v) { rc.model.cand.top_k = to_int(k, v); }},
      {"gnn.layers", [](RunConfig& rc, const std::string& k,
                        const std::string& v) { rc.model.gnn.layers = to_int(k, v); }},
      {"gnn.weight_mode",
       [](RunConfig& rc, const std::string&, const std::string& v) {
         rc.model.gnn.weight_mode = weight_mode_from_string(v);
       }},
      {"gnn.topk", [](RunConfig& rc, const std::string& k,
                      const std::string& v) { rc.model.gnn.topk = to_int(k, v); }},
      {"gnn.neighborhood",
       [](RunConfig& rc, const std::string&, const std::string& v) {
         rc.model.gnn.neighborhood = neighborhood_from_string(v);
       }},
      {"scorer.hidden", [](RunConfig& rc, const std::string& k,
                           const std::string& v) { rc.model.hidden = to_int(k, v); }},
      {"scorer.feat_dim", [](RunConfig& rc, const std::string& k,
                             const std::string& v) { rc.model.feat_dim = to_int(k, v); }},
      {"decode.gamma", [](RunConfig& rc, const std::string& k,
                          const std::string& v) { rc.model.gamma = to_double(k, v); }},
      {"decode.mode",
       [](RunConfig& rc, const std::string&, const std::string& v) {
         rc.model.decode = decode_mode_from_string(v);
       }},
      {"decode.arc_mode",
       [](RunConfig& rc, const std::string&, const std::string& v) {
         rc.model.arc_mode = arc_mode_from_string(v);
       }},
      {"train.lr", [](RunConfig& rc, const std::string& k,
                      const std::string& v) { rc.train.lr = to_double(k, v); }},
      {"train.decay", [](RunConfig& rc, const std::string& k,
                         const std::string& v) { rc.train.decay = to_double(k, v); }},
      {"train.epochs", [](RunConfig& rc, const std::string& k,
                          const std::string& v) { rc.train.epochs = to_int(k, v); }},
      {"train.clip", [](RunConfig& rc, const std::string& k,
                        const std::string& v) { rc.train.clip = to_double(k, v); }},
      {"train.lambda", [](RunConfig& rc, const std::string& k,
                          const std::string& v) { rc.train.lambda = to_double(k, v); }},
      {"train.sib_cap", [](RunConfig& rc, const std::string& k,
                           const std::string& v) { rc.train.sib_cap = to_int(k, v); }},
      {"train.stop_at_f1", [](RunConfig& rc, const std::string& k, const std::string& v) {
         rc.train.stop_at_f1 = to_double(k, v);
       }}};
  return table;
}

}  // namespace

void apply_config_entry(RunConfig& rc, const std::string& key, const std::string& value) {
  auto it = setters().find(key);
  require(it != setters().end(), "config: unknown key: " + key);
  it->second(rc, key, value);
}

void load_config_file(RunConfig& rc, const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "config: cannot open: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    require(eq != std::string::npos,
            "config: " + path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_config_entry(rc, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

RunConfig parse_run_config(const std::vector<std::string>& args) {
  std::vector<std::pair<std::string, std::string>> kvs;
  std::string config_path;
  for (const std::string& a : args) {
    require(a.rfind("--", 0) == 0, "config: expected --key=value, got '" + a + "'");
    const size_t eq = a.find('=');
    require(eq != std::string::npos, "config: expected --key=value, got '" + a + "'");
    const std::string key = a.substr(2, eq - 2), value = a.substr(eq + 1);
    if (key == "config")
      config_path = value;
    else
      kvs.emplace_back(key, value);
  }
  RunConfig rc;
  if (!config_path.empty()) load_config_file(rc, config_path);
  for (const auto& [k, v] : kvs) apply_config_entry(rc, k, v);
  return rc;
}

std::string dump_config(const RunConfig& rc) {
  std::ostringstream os;
  os.precision(17);
  os << "corpus=" << rc.corpus << "\n";
  os << "dev=" << rc.dev << "\n";
  os << "embeddings=" << rc.embeddings << "\n";
  os << "checkpoint=" << rc.checkpoint << "\n";
  os << "output=" << rc.output << "\n";
  os << "predictions=" << rc.predictions << "\n";
  os << "gold=" << rc.gold << "\n";
  os << "log=" << rc.log << "\n";
  os << "seed=" << rc.seed << "\n";
  os << "jobs=" << rc.jobs << "\n";
  os << "enc.d_emb=" << rc.model.enc.d_emb << "\n";
  os << "enc.d_lstm=" << rc.model.enc.d_lstm << "\n";
  os << "enc.d_width=" << rc.model.enc.d_width << "\n";
  os << "cand.max_width=" << rc.model.cand.max_width << "\n";
  os << "cand.spans_ratio=" << rc.model.cand.spans_ratio << "\n";
  os << "cand.top_k=" << rc.model.cand.top_k << "\n";
  os << "gnn.layers=" << rc.model.gnn.layers << "\n";
  os << "gnn.weight_mode=" << to_string(rc.model.gnn.weight_mode) << "\n";
  os << "gnn.topk=" << rc.model.gnn.topk << "\n";
  os << "gnn.neighborhood=" << to_string(rc.model.gnn.neighborhood) << "\n";
  os << "scorer.hidden=" << rc.model.hidden << "\n";
  os << "scorer.feat_dim=" << rc.model.feat_dim << "\n";
  os << "decode.gamma=" << rc.model.gamma << "\n";
  os << "decode.mode=" << to_string(rc.model.decode) << "\n";
  os << "decode.arc_mode=" << to_string(rc.model.arc_mode) << "\n";
  os << "train.lr=" << rc.train.lr << "\n";
  os << "train.decay=" << rc.train.decay << "\n";
  os << "train.epochs=" << rc.train.epochs << "\n";
  os << "train.clip=" << rc.train.clip << "\n";
  os << "train.lambda=" << rc.train.lambda << "\n";
  os << "train.sib_cap=" << rc.train.sib_cap << "\n";
  os << "train.stop_at_f1=" << rc.train.stop_at_f1 << "\n";
  return os.str();
}

}  // namespace coref
