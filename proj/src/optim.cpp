#include "coref/optim.hpp"

#include <cmath>

#include "coref/checkpoint.hpp"

namespace coref {

int ParamStore::add(const std::string& name, Tensor value) {
  require(!contains(name), "params: duplicate name: " + name);
  Entry e;
  e.name = name;
  e.m = Tensor(value.rows(), value.cols());
  e.v = Tensor(value.rows(), value.cols());
  e.value = std::move(value);
  entries_.push_back(std::move(e));
  const int idx = static_cast<int>(entries_.size()) - 1;
  by_name_[name] = idx;
  return idx;
}

int ParamStore::add_glorot(const std::string& name, int rows, int cols, Rng& rng) {
  const double r = std::sqrt(6.0 / (rows + cols));
  Tensor t(rows, cols);
  for (double& x : t.data) x = rng.uniform(-r, r);
  return add(name, std::move(t));
}

int ParamStore::add_zeros(const std::string& name, int rows, int cols) {
  return add(name, Tensor(rows, cols));
}

int ParamStore::index_of(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

Tensor& ParamStore::value(const std::string& name) {
  const int i = index_of(name);
  require(i >= 0, "params: unknown name: " + name);
  return entries_[i].value;
}

const Tensor& ParamStore::value(const std::string& name) const {
  const int i = index_of(name);
  require(i >= 0, "params: unknown name: " + name);
  return entries_[i].value;
}

void ParamStore::save(const std::string& path) const {
  std::vector<std::pair<std::string, Tensor>> tensors;
  tensors.reserve(entries_.size());
  for (const Entry& e : entries_) tensors.emplace_back(e.name, e.value);
  save_tensors(path, tensors);
}

void ParamStore::load(const std::string& path) {
  auto tensors = load_tensors(path);
  require(tensors.size() == entries_.size(), "params: checkpoint entry count mismatch");
  for (auto& [name, t] : tensors) {
    const int i = index_of(name);
    require(i >= 0, "params: checkpoint has unknown parameter: " + name);
    Entry& e = entries_[i];
    require(e.value.shape == t.shape, "params: shape mismatch for: " + name);
    e.value = std::move(t);
    e.m = Tensor(e.value.rows(), e.value.cols());
    e.v = Tensor(e.value.rows(), e.value.cols());
    e.steps = 0;
  }
}

double clip_global_norm(std::vector<Tensor>& grads, double max_norm) {
  double sq = 0.0;
  for (const Tensor& g : grads)
    for (double x : g.data) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (Tensor& g : grads)
      for (double& x : g.data) x *= s;
  }
  return norm;
}

void adam_step(ParamStore& params, const std::vector<Tensor>& grads, const AdamConfig& cfg) {
  require(grads.size() == params.size(), "adam: gradient count mismatch");
  for (size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].data.empty()) continue;
    require(grads[i].all_finite(),
            "adam: non-finite gradient for " + params.entry(static_cast<int>(i)).name);
  }
  for (size_t i = 0; i < grads.size(); ++i) {
    const Tensor& g = grads[i];
    if (g.data.empty()) continue;
    ParamStore::Entry& e = params.entry(static_cast<int>(i));
    require(g.shape == e.value.shape, "adam: gradient shape mismatch for " + e.name);
    e.steps += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(e.steps));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(e.steps));
    for (size_t k = 0; k < g.data.size(); ++k) {
      const double gk = g.data[k];
      e.m.data[k] = cfg.beta1 * e.m.data[k] + (1.0 - cfg.beta1) * gk;
      e.v.data[k] = cfg.beta2 * e.v.data[k] + (1.0 - cfg.beta2) * gk * gk;
      const double mhat = e.m.data[k] / bc1;
      const double vhat = e.v.data[k] / bc2;
      e.value.data[k] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace coref
