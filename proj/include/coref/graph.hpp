#pragma once

#include <string>
#include <vector>

#include "coref/tensor.hpp"

namespace coref {

using NodeId = int;

enum class Op : unsigned char {
  kLeaf,
  kMatmul,
  kAdd,       // same shape, or b is a 1 x c row broadcast over a's rows
  kSub,
  kMul,       // elementwise, same shape
  kScale,     // constant scalar multiplier
  kReshape,
  kConcatRows,
  kConcatCols,
  kSliceCols,
  kGatherRows,
  kSigmoid,
  kTanh,
  kRelu,
  kSoftmaxRows,
  kLogSumExpRows,  // r x c -> r x 1
  kSumAll,         // -> 1 x 1
};

// Tape-style computation graph over rank-2 tensors. Nodes evaluate eagerly
// as they are built, in insertion order; backward walks the tape in reverse
// insertion order, which fixes the gradient accumulation order and keeps
// runs bit-identical. recompute() re-evaluates the whole tape after a leaf
// has been rebound (used by the finite-difference checks).
class Graph {
 public:
  // When set, every evaluated value is checked for NaN/Inf.
  bool check_finite = true;

  NodeId leaf(Tensor value, bool requires_grad = false);
  NodeId constant(double v) { return leaf(Tensor::scalar(v), false); }

  NodeId matmul(NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId scale(NodeId a, double c);
  NodeId reshape(NodeId a, int r, int c);
  NodeId concat_rows(const std::vector<NodeId>& parts);
  NodeId concat_cols(const std::vector<NodeId>& parts);
  NodeId slice_cols(NodeId a, int first, int count);
  NodeId gather_rows(NodeId a, std::vector<int> rows);
  NodeId sigmoid(NodeId a);
  NodeId tanh(NodeId a);
  NodeId relu(NodeId a);
  NodeId softmax_rows(NodeId a);
  NodeId logsumexp_rows(NodeId a);
  NodeId sum_all(NodeId a);

  const Tensor& value(NodeId id) const { return nodes_[id].value; }
  const Tensor& grad(NodeId id) const { return nodes_[id].grad; }
  bool is_leaf(NodeId id) const { return nodes_[id].op == Op::kLeaf; }
  Op op(NodeId id) const { return nodes_[id].op; }
  const std::vector<NodeId>& inputs(NodeId id) const { return nodes_[id].inputs; }
  size_t size() const { return nodes_.size(); }

  // Rebind a leaf's value (shape must match) and re-evaluate the tape.
  void set_leaf(NodeId id, Tensor value);
  void recompute();

  // Reverse-mode pass from a scalar output. Clears previous gradients.
  void backward(NodeId output);

 private:
  struct Node {
    Op op = Op::kLeaf;
    std::vector<NodeId> inputs;
    Tensor value;
    Tensor grad;             // allocated by backward()
    std::vector<int> index;  // gather rows
    double c = 0.0;          // scale constant
    int a0 = 0, a1 = 0;      // slice first/count, reshape dims
    bool requires_grad = false;
  };

  std::vector<Node> nodes_;

  NodeId push(Node n);
  NodeId push_unary(Op op, NodeId a);
  void eval(Node& n);
  void check(const Node& n) const;
};

}  // namespace coref
