#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace coref {

struct CorefError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw CorefError(msg);
}

// Dense row-major tensor of 64-bit reals. The compute graph only ever
// builds rank-2 tensors (scalars are 1x1, vectors 1xn); the checkpoint
// container accepts any rank.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c) : shape{r, c}, data(static_cast<size_t>(r) * c, 0.0) {}

  static Tensor zeros(int r, int c) { return Tensor(r, c); }

  static Tensor full(int r, int c, double v) {
    Tensor t(r, c);
    for (double& x : t.data) x = v;
    return t;
  }

  static Tensor scalar(double v) {
    Tensor t(1, 1);
    t.data[0] = v;
    return t;
  }

  static Tensor row(const std::vector<double>& v) {
    Tensor t(1, static_cast<int>(v.size()));
    t.data = v;
    return t;
  }

  static Tensor matrix(int r, int c, std::vector<double> v) {
    require(static_cast<size_t>(r) * c == v.size(), "tensor: data/shape mismatch");
    Tensor t;
    t.shape = {r, c};
    t.data = std::move(v);
    return t;
  }

  int64_t size() const {
    int64_t n = 1;
    for (int d : shape) n *= d;
    return shape.empty() ? (data.empty() ? 0 : 1) : n;
  }

  int rows() const { return shape.size() == 2 ? shape[0] : 0; }
  int cols() const { return shape.size() == 2 ? shape[1] : 0; }

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols() + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols() + c]; }

  double item() const {
    require(size() == 1, "tensor: item() on non-scalar");
    return data[0];
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

}  // namespace coref
