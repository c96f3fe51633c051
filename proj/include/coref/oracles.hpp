#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coref {

struct ScoreTable;
struct AntecedentTree;

// Outcome of one randomized verification suite.
struct SuiteReport {
  std::string name;
  int instances = 0;
  int checked = 0;      // individual comparisons (trees, coordinates, ...)
  int failures = 0;
  double worst = 0.0;   // largest deviation observed
  std::vector<std::string> notes;  // one dump per failing instance, capped

  bool ok() const { return failures == 0; }
};

// Verifies proposed trees for one table (n <= 10) against exhaustive
// enumeration: pipeline score >= Eisner score >= every projective tree;
// a projective brute-force optimum must be matched to 1e-9; at gamma = 1 the
// pipeline score must equal sum_i max over Y_i + {eps}. Failures append an
// instance dump to rep.notes. Exposed so tests can feed perturbed trees.
void check_decode_instance(const ScoreTable& t, const AntecedentTree& eisner,
                           const AntecedentTree& pipeline, SuiteReport& rep,
                           const std::string& label);

// Random decode instances with spans <= max_n, random candidate sets and
// seeded scores, gamma cycling {0, 0.5, 0.8, 1}; runs check_decode_instance
// on the real Eisner + hill-climb outputs.
SuiteReport decoder_oracle_suite(uint64_t seed, int instances, int max_n = 7);

// Central finite differences through full model forwards plus both losses on
// small random documents, cycling GNN depth {0,1,2}, soft/topk/uniform edge
// weights, both neighborhoods, and mixed gamma/lambda. Checks every
// registered parameter coordinate of each instance.
SuiteReport gradient_oracle_suite(uint64_t seed, int instances, double tol = 1e-4);

std::string format_report(const SuiteReport& r);

}  // namespace coref
