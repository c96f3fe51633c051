#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "coref/rng.hpp"
#include "coref/tensor.hpp"

namespace coref {

// Named trainable tensors plus Adam state. Parameters keep insertion order,
// which fixes checkpoint layout and update order across runs.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Tensor value;
    Tensor m, v;  // Adam first/second moments
    int64_t steps = 0;
  };

  int add(const std::string& name, Tensor value);
  // Uniform init in [-r, r] with r = sqrt(6 / (rows + cols)).
  int add_glorot(const std::string& name, int rows, int cols, Rng& rng);
  int add_zeros(const std::string& name, int rows, int cols);

  bool contains(const std::string& name) const { return by_name_.count(name) > 0; }
  int index_of(const std::string& name) const;
  Entry& entry(int i) { return entries_[i]; }
  const Entry& entry(int i) const { return entries_[i]; }
  Tensor& value(const std::string& name);
  const Tensor& value(const std::string& name) const;
  size_t size() const { return entries_.size(); }

  void save(const std::string& path) const;
  // Requires the file to hold exactly the registered names with the
  // registered shapes. Moments and step counts reset.
  void load(const std::string& path);

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, int> by_name_;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Scales grads so their joint l2 norm is at most max_norm; returns the norm
// seen before clipping. Empty tensors are skipped.
double clip_global_norm(std::vector<Tensor>& grads, double max_norm);

// One Adam update per parameter; grads[i] pairs with entry(i). Parameters
// with an empty gradient are skipped and keep their step count, so bias
// correction stays per-parameter. Non-finite gradients abort the step.
void adam_step(ParamStore& params, const std::vector<Tensor>& grads, const AdamConfig& cfg);

}  // namespace coref
