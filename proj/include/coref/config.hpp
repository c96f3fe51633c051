#pragma once

#include <string>
#include <vector>

#include "coref/model.hpp"
#include "coref/trainer.hpp"

namespace coref {

// Every tunable in one flat key=value namespace shared by config files and
// command-line flags.
struct RunConfig {
  std::string corpus, dev, embeddings, checkpoint, output, predictions, gold, log;
  uint64_t seed = 1;
  int jobs = 1;
  ModelConfig model;
  TrainConfig train;
};

// One key=value assignment; throws on unknown keys or unparseable values.
void apply_config_entry(RunConfig& rc, const std::string& key, const std::string& value);

// key=value lines with '#' comments and blank lines allowed.
void load_config_file(RunConfig& rc, const std::string& path);

// Args of the form --key=value; --config=FILE loads that file first so the
// remaining flags override it. Anything else is rejected.
RunConfig parse_run_config(const std::vector<std::string>& args);

// The full key table with current values, one "key=value" line per key, in a
// fixed order. load_config_file on the output reproduces the config.
std::string dump_config(const RunConfig& rc);

}  // namespace coref
