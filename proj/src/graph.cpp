#include "coref/graph.hpp"

#include <algorithm>
#include <cmath>

#include "coref/kernels.hpp"

namespace coref {

NodeId Graph::push(Node n) {
  if (n.op != Op::kLeaf) {
    for (NodeId in : n.inputs) n.requires_grad = n.requires_grad || nodes_[in].requires_grad;
    eval(n);
  }
  check(n);
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

void Graph::check(const Node& n) const {
  if (check_finite && !n.value.all_finite()) throw CorefError("graph: non-finite value");
}

NodeId Graph::leaf(Tensor value, bool requires_grad) {
  require(value.shape.size() == 2, "graph: leaves must be rank-2");
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  return push(std::move(n));
}

void Graph::set_leaf(NodeId id, Tensor value) {
  Node& n = nodes_[id];
  require(n.op == Op::kLeaf, "graph: set_leaf on non-leaf");
  require(n.value.shape == value.shape, "graph: set_leaf shape mismatch");
  n.value = std::move(value);
}

NodeId Graph::matmul(NodeId a, NodeId b) {
  require(nodes_[a].value.cols() == nodes_[b].value.rows(), "matmul: inner dims differ");
  Node n;
  n.op = Op::kMatmul;
  n.inputs = {a, b};
  return push(std::move(n));
}

NodeId Graph::add(NodeId a, NodeId b) {
  const Tensor& ta = nodes_[a].value;
  const Tensor& tb = nodes_[b].value;
  require(ta.same_shape(tb) || (tb.rows() == 1 && tb.cols() == ta.cols()),
          "add: shape mismatch");
  Node n;
  n.op = Op::kAdd;
  n.inputs = {a, b};
  return push(std::move(n));
}

NodeId Graph::sub(NodeId a, NodeId b) {
  require(nodes_[a].value.same_shape(nodes_[b].value), "sub: shape mismatch");
  Node n;
  n.op = Op::kSub;
  n.inputs = {a, b};
  return push(std::move(n));
}

NodeId Graph::mul(NodeId a, NodeId b) {
  require(nodes_[a].value.same_shape(nodes_[b].value), "mul: shape mismatch");
  Node n;
  n.op = Op::kMul;
  n.inputs = {a, b};
  return push(std::move(n));
}

NodeId Graph::scale(NodeId a, double c) {
  Node n;
  n.op = Op::kScale;
  n.inputs = {a};
  n.c = c;
  return push(std::move(n));
}

NodeId Graph::reshape(NodeId a, int r, int c) {
  require(static_cast<int64_t>(r) * c == nodes_[a].value.size(), "reshape: size mismatch");
  Node n;
  n.op = Op::kReshape;
  n.inputs = {a};
  n.a0 = r;
  n.a1 = c;
  return push(std::move(n));
}

NodeId Graph::concat_rows(const std::vector<NodeId>& parts) {
  require(!parts.empty(), "concat_rows: empty");
  int c = nodes_[parts[0]].value.cols();
  for (NodeId p : parts) require(nodes_[p].value.cols() == c, "concat_rows: col mismatch");
  Node n;
  n.op = Op::kConcatRows;
  n.inputs = parts;
  return push(std::move(n));
}

NodeId Graph::concat_cols(const std::vector<NodeId>& parts) {
  require(!parts.empty(), "concat_cols: empty");
  int r = nodes_[parts[0]].value.rows();
  for (NodeId p : parts) require(nodes_[p].value.rows() == r, "concat_cols: row mismatch");
  Node n;
  n.op = Op::kConcatCols;
  n.inputs = parts;
  return push(std::move(n));
}

NodeId Graph::slice_cols(NodeId a, int first, int count) {
  require(first >= 0 && count >= 1 && first + count <= nodes_[a].value.cols(),
          "slice_cols: out of range");
  Node n;
  n.op = Op::kSliceCols;
  n.inputs = {a};
  n.a0 = first;
  n.a1 = count;
  return push(std::move(n));
}

NodeId Graph::gather_rows(NodeId a, std::vector<int> rows) {
  require(!rows.empty(), "gather_rows: empty index");
  for (int r : rows)
    require(r >= 0 && r < nodes_[a].value.rows(), "gather_rows: index out of range");
  Node n;
  n.op = Op::kGatherRows;
  n.inputs = {a};
  n.index = std::move(rows);
  return push(std::move(n));
}

NodeId Graph::push_unary(Op op, NodeId a) {
  Node n;
  n.op = op;
  n.inputs = {a};
  return push(std::move(n));
}

NodeId Graph::sigmoid(NodeId a) { return push_unary(Op::kSigmoid, a); }
NodeId Graph::tanh(NodeId a) { return push_unary(Op::kTanh, a); }
NodeId Graph::relu(NodeId a) { return push_unary(Op::kRelu, a); }
NodeId Graph::softmax_rows(NodeId a) { return push_unary(Op::kSoftmaxRows, a); }
NodeId Graph::logsumexp_rows(NodeId a) { return push_unary(Op::kLogSumExpRows, a); }
NodeId Graph::sum_all(NodeId a) { return push_unary(Op::kSumAll, a); }

void Graph::eval(Node& n) {
  const auto& in = n.inputs;
  auto v = [&]() -> const Tensor& { return nodes_[in[0]].value; };
  switch (n.op) {
    case Op::kLeaf:
      break;
    case Op::kMatmul: {
      const Tensor& a = nodes_[in[0]].value;
      const Tensor& b = nodes_[in[1]].value;
      n.value = Tensor(a.rows(), b.cols());
      kern::matmul(a.data.data(), b.data.data(), n.value.data.data(), a.rows(), a.cols(),
                   b.cols());
      break;
    }
    case Op::kAdd: {
      const Tensor& a = nodes_[in[0]].value;
      const Tensor& b = nodes_[in[1]].value;
      n.value = Tensor(a.rows(), a.cols());
      if (a.same_shape(b)) {
        kern::add(a.data.data(), b.data.data(), n.value.data.data(), a.data.size());
      } else {
        for (int i = 0; i < a.rows(); ++i)
          kern::add_serial(a.data.data() + static_cast<size_t>(i) * a.cols(), b.data.data(),
                           n.value.data.data() + static_cast<size_t>(i) * a.cols(), a.cols());
      }
      break;
    }
    case Op::kSub: {
      const Tensor& a = nodes_[in[0]].value;
      const Tensor& b = nodes_[in[1]].value;
      n.value = Tensor(a.rows(), a.cols());
      kern::sub(a.data.data(), b.data.data(), n.value.data.data(), a.data.size());
      break;
    }
    case Op::kMul: {
      const Tensor& a = nodes_[in[0]].value;
      const Tensor& b = nodes_[in[1]].value;
      n.value = Tensor(a.rows(), a.cols());
      kern::mul(a.data.data(), b.data.data(), n.value.data.data(), a.data.size());
      break;
    }
    case Op::kScale: {
      const Tensor& a = v();
      n.value = Tensor(a.rows(), a.cols());
      kern::scale(a.data.data(), n.c, n.value.data.data(), a.data.size());
      break;
    }
    case Op::kReshape: {
      n.value = v();
      n.value.shape = {n.a0, n.a1};
      break;
    }
    case Op::kConcatRows: {
      int rows = 0;
      const int cols = nodes_[in[0]].value.cols();
      for (NodeId p : in) rows += nodes_[p].value.rows();
      n.value = Tensor(rows, cols);
      double* out = n.value.data.data();
      for (NodeId p : in) {
        const Tensor& t = nodes_[p].value;
        std::copy(t.data.begin(), t.data.end(), out);
        out += t.data.size();
      }
      break;
    }
    case Op::kConcatCols: {
      const int rows = nodes_[in[0]].value.rows();
      int cols = 0;
      for (NodeId p : in) cols += nodes_[p].value.cols();
      n.value = Tensor(rows, cols);
      int off = 0;
      for (NodeId p : in) {
        const Tensor& t = nodes_[p].value;
        for (int i = 0; i < rows; ++i)
          std::copy(t.data.begin() + static_cast<size_t>(i) * t.cols(),
                    t.data.begin() + static_cast<size_t>(i + 1) * t.cols(),
                    n.value.data.begin() + static_cast<size_t>(i) * cols + off);
        off += t.cols();
      }
      break;
    }
    case Op::kSliceCols: {
      const Tensor& a = v();
      n.value = Tensor(a.rows(), n.a1);
      for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < n.a1; ++j) n.value.at(i, j) = a.at(i, n.a0 + j);
      break;
    }
    case Op::kGatherRows: {
      const Tensor& a = v();
      n.value = Tensor(static_cast<int>(n.index.size()), a.cols());
      for (size_t i = 0; i < n.index.size(); ++i)
        std::copy(a.data.begin() + static_cast<size_t>(n.index[i]) * a.cols(),
                  a.data.begin() + static_cast<size_t>(n.index[i] + 1) * a.cols(),
                  n.value.data.begin() + i * a.cols());
      break;
    }
    case Op::kSigmoid: {
      const Tensor& a = v();
      n.value = Tensor(a.rows(), a.cols());
      kern::sigmoid(a.data.data(), n.value.data.data(), a.data.size());
      break;
    }
    case Op::kTanh: {
      const Tensor& a = v();
      n.value = Tensor(a.rows(), a.cols());
      kern::tanh_map(a.data.data(), n.value.data.data(), a.data.size());
      break;
    }
    case Op::kRelu: {
      const Tensor& a = v();
      n.value = Tensor(a.rows(), a.cols());
      kern::relu(a.data.data(), n.value.data.data(), a.data.size());
      break;
    }
    case Op::kSoftmaxRows: {
      const Tensor& a = v();
      n.value = Tensor(a.rows(), a.cols());
      kern::softmax_rows(a.data.data(), n.value.data.data(), a.rows(), a.cols());
      break;
    }
    case Op::kLogSumExpRows: {
      const Tensor& a = v();
      n.value = Tensor(a.rows(), 1);
      kern::logsumexp_rows(a.data.data(), n.value.data.data(), a.rows(), a.cols());
      break;
    }
    case Op::kSumAll: {
      const Tensor& a = v();
      double s = 0.0;
      for (double x : a.data) s += x;
      n.value = Tensor::scalar(s);
      break;
    }
  }
}

void Graph::recompute() {
  for (Node& n : nodes_) {
    if (n.op == Op::kLeaf) continue;
    eval(n);
    check(n);
  }
}

void Graph::backward(NodeId output) {
  Node& out = nodes_[output];
  require(out.value.size() == 1, "backward: output must be scalar");

  for (Node& n : nodes_) {
    if (n.requires_grad || n.op != Op::kLeaf)
      n.grad = Tensor(n.value.rows(), n.value.cols());
    else
      n.grad = Tensor();
  }
  nodes_[output].grad.data[0] = 1.0;

  for (NodeId id = output; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.op == Op::kLeaf || !n.requires_grad) continue;
    if (n.grad.data.empty()) continue;
    const Tensor& g = n.grad;
    const auto& in = n.inputs;
    auto gin = [&](int k) -> Tensor& { return nodes_[in[k]].grad; };
    auto vin = [&](int k) -> const Tensor& { return nodes_[in[k]].value; };
    auto wants = [&](int k) { return !nodes_[in[k]].grad.data.empty(); };

    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kMatmul: {
        const Tensor& a = vin(0);
        const Tensor& b = vin(1);
        if (wants(0))
          kern::matmul_acc_a(g.data.data(), b.data.data(), gin(0).data.data(), a.rows(),
                             a.cols(), b.cols());
        if (wants(1))
          kern::matmul_acc_b(a.data.data(), g.data.data(), gin(1).data.data(), a.rows(),
                             a.cols(), b.cols());
        break;
      }
      case Op::kAdd: {
        if (wants(0))
          for (size_t i = 0; i < g.data.size(); ++i) gin(0).data[i] += g.data[i];
        if (wants(1)) {
          Tensor& gb = gin(1);
          if (gb.same_shape(g)) {
            for (size_t i = 0; i < g.data.size(); ++i) gb.data[i] += g.data[i];
          } else {  // row broadcast: sum over rows
            for (int i = 0; i < g.rows(); ++i)
              for (int j = 0; j < g.cols(); ++j) gb.data[j] += g.at(i, j);
          }
        }
        break;
      }
      case Op::kSub: {
        if (wants(0))
          for (size_t i = 0; i < g.data.size(); ++i) gin(0).data[i] += g.data[i];
        if (wants(1))
          for (size_t i = 0; i < g.data.size(); ++i) gin(1).data[i] -= g.data[i];
        break;
      }
      case Op::kMul: {
        if (wants(0))
          for (size_t i = 0; i < g.data.size(); ++i) gin(0).data[i] += g.data[i] * vin(1).data[i];
        if (wants(1))
          for (size_t i = 0; i < g.data.size(); ++i) gin(1).data[i] += g.data[i] * vin(0).data[i];
        break;
      }
      case Op::kScale: {
        if (wants(0))
          for (size_t i = 0; i < g.data.size(); ++i) gin(0).data[i] += g.data[i] * n.c;
        break;
      }
      case Op::kReshape: {
        if (wants(0))
          for (size_t i = 0; i < g.data.size(); ++i) gin(0).data[i] += g.data[i];
        break;
      }
      case Op::kConcatRows: {
        size_t off = 0;
        for (NodeId p : in) {
          Tensor& gp = nodes_[p].grad;
          const size_t sz = nodes_[p].value.data.size();
          if (!gp.data.empty())
            for (size_t i = 0; i < sz; ++i) gp.data[i] += g.data[off + i];
          off += sz;
        }
        break;
      }
      case Op::kConcatCols: {
        int off = 0;
        const int rows = g.rows();
        for (NodeId p : in) {
          Tensor& gp = nodes_[p].grad;
          const int pc = nodes_[p].value.cols();
          if (!gp.data.empty())
            for (int i = 0; i < rows; ++i)
              for (int j = 0; j < pc; ++j) gp.at(i, j) += g.at(i, off + j);
          off += pc;
        }
        break;
      }
      case Op::kSliceCols: {
        if (wants(0)) {
          Tensor& ga = gin(0);
          for (int i = 0; i < g.rows(); ++i)
            for (int j = 0; j < g.cols(); ++j) ga.at(i, n.a0 + j) += g.at(i, j);
        }
        break;
      }
      case Op::kGatherRows: {
        if (wants(0)) {
          Tensor& ga = gin(0);
          for (size_t i = 0; i < n.index.size(); ++i)
            for (int j = 0; j < g.cols(); ++j) ga.at(n.index[i], j) += g.at(static_cast<int>(i), j);
        }
        break;
      }
      case Op::kSigmoid: {
        if (wants(0))
          for (size_t i = 0; i < g.data.size(); ++i) {
            const double y = n.value.data[i];
            gin(0).data[i] += g.data[i] * y * (1.0 - y);
          }
        break;
      }
      case Op::kTanh: {
        if (wants(0))
          for (size_t i = 0; i < g.data.size(); ++i) {
            const double y = n.value.data[i];
            gin(0).data[i] += g.data[i] * (1.0 - y * y);
          }
        break;
      }
      case Op::kRelu: {
        if (wants(0))
          for (size_t i = 0; i < g.data.size(); ++i)
            if (vin(0).data[i] > 0.0) gin(0).data[i] += g.data[i];
        break;
      }
      case Op::kSoftmaxRows: {
        if (wants(0)) {
          const int r = g.rows(), c = g.cols();
          for (int i = 0; i < r; ++i) {
            double dot = 0.0;
            for (int j = 0; j < c; ++j) dot += g.at(i, j) * n.value.at(i, j);
            for (int j = 0; j < c; ++j)
              gin(0).at(i, j) += n.value.at(i, j) * (g.at(i, j) - dot);
          }
        }
        break;
      }
      case Op::kLogSumExpRows: {
        if (wants(0)) {
          const Tensor& x = vin(0);
          const int r = x.rows(), c = x.cols();
          std::vector<double> sm(static_cast<size_t>(r) * c);
          kern::softmax_rows_serial(x.data.data(), sm.data(), r, c);
          for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j)
              gin(0).at(i, j) += g.at(i, 0) * sm[static_cast<size_t>(i) * c + j];
        }
        break;
      }
      case Op::kSumAll: {
        if (wants(0))
          for (size_t i = 0; i < gin(0).data.size(); ++i) gin(0).data[i] += g.data[0];
        break;
      }
    }
  }
}

}  // namespace coref
