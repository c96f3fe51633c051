#pragma once

#include <cmath>
#include <vector>

#include "coref/graph.hpp"

namespace coref {

struct FdResult {
  double max_rel_err = 0.0;
  int checked = 0;
  int skipped = 0;
};

// Central-difference check of every coordinate of the given leaves against
// the analytic gradient of the scalar node `out`. A coordinate is skipped
// when the perturbation flips the sign of any relu input (the subgradient
// and the difference quotient legitimately disagree across the kink).
// Relative error uses denominator max(1, |analytic|, |fd|).
inline FdResult fd_check(Graph& g, NodeId out, const std::vector<NodeId>& leaves,
                         double h = 1e-5) {
  g.recompute();
  g.backward(out);

  std::vector<Tensor> grads;
  grads.reserve(leaves.size());
  for (NodeId id : leaves) grads.push_back(g.grad(id));

  std::vector<NodeId> relu_nodes;
  for (NodeId id = 0; id < static_cast<NodeId>(g.size()); ++id)
    if (g.op(id) == Op::kRelu) relu_nodes.push_back(g.inputs(id)[0]);

  auto relu_masks = [&]() {
    std::vector<bool> m;
    for (NodeId id : relu_nodes)
      for (double x : g.value(id).data) m.push_back(x > 0.0);
    return m;
  };

  FdResult res;
  for (size_t li = 0; li < leaves.size(); ++li) {
    const NodeId leaf = leaves[li];
    Tensor base = g.value(leaf);
    for (size_t k = 0; k < base.data.size(); ++k) {
      Tensor t = base;
      t.data[k] = base.data[k] + h;
      g.set_leaf(leaf, t);
      g.recompute();
      const double fp = g.value(out).item();
      const auto mask_p = relu_masks();

      t.data[k] = base.data[k] - h;
      g.set_leaf(leaf, t);
      g.recompute();
      const double fm = g.value(out).item();
      const auto mask_m = relu_masks();

      if (mask_p != mask_m) {
        ++res.skipped;
        continue;
      }
      const double fd = (fp - fm) / (2.0 * h);
      const double an = grads[li].data[k];
      const double denom = std::max({1.0, std::fabs(an), std::fabs(fd)});
      res.max_rel_err = std::max(res.max_rel_err, std::fabs(an - fd) / denom);
      ++res.checked;
    }
    g.set_leaf(leaf, base);
  }
  g.recompute();
  return res;
}

}  // namespace coref
