#include "coref/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace coref::kern {

namespace {
int g_threads = 1;
}

void set_threads(int n) {
  g_threads = std::max(1, n);
#ifdef _OPENMP
  omp_set_num_threads(g_threads);
#endif
}

int threads() { return g_threads; }

static bool parallel() { return g_threads > 1; }

// ---------------------------------------------------------------- matmul

void matmul_serial(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    double* ci = c + static_cast<size_t>(i) * n;
    std::fill(ci, ci + n, 0.0);
    const double* ai = a + static_cast<size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

void matmul_omp(const double* a, const double* b, double* c, int m, int k, int n) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    double* ci = c + static_cast<size_t>(i) * n;
    std::fill(ci, ci + n, 0.0);
    const double* ai = a + static_cast<size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

void matmul(const double* a, const double* b, double* c, int m, int k, int n) {
  if (parallel() && m > 1)
    matmul_omp(a, b, c, m, k, n);
  else
    matmul_serial(a, b, c, m, k, n);
}

void matmul_acc_a_serial(const double* dc, const double* b, double* da, int m, int k, int n) {
  // da(m x k) += dc(m x n) * b^T, i.e. da[i][p] += sum_j dc[i][j] * b[p][j]
  for (int i = 0; i < m; ++i) {
    double* dai = da + static_cast<size_t>(i) * k;
    const double* dci = dc + static_cast<size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      const double* bp = b + static_cast<size_t>(p) * n;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += dci[j] * bp[j];
      dai[p] += acc;
    }
  }
}

void matmul_acc_a_omp(const double* dc, const double* b, double* da, int m, int k, int n) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    double* dai = da + static_cast<size_t>(i) * k;
    const double* dci = dc + static_cast<size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      const double* bp = b + static_cast<size_t>(p) * n;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += dci[j] * bp[j];
      dai[p] += acc;
    }
  }
}

void matmul_acc_a(const double* dc, const double* b, double* da, int m, int k, int n) {
  if (parallel() && m > 1)
    matmul_acc_a_omp(dc, b, da, m, k, n);
  else
    matmul_acc_a_serial(dc, b, da, m, k, n);
}

void matmul_acc_b_serial(const double* a, const double* dc, double* db, int m, int k, int n) {
  // db(k x n) += a^T * dc, i.e. db[p][j] += sum_i a[i][p] * dc[i][j]
  // Loop p outer so each output row accumulates in a fixed i order.
  for (int p = 0; p < k; ++p) {
    double* dbp = db + static_cast<size_t>(p) * n;
    for (int i = 0; i < m; ++i) {
      const double av = a[static_cast<size_t>(i) * k + p];
      if (av == 0.0) continue;
      const double* dci = dc + static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j) dbp[j] += av * dci[j];
    }
  }
}

void matmul_acc_b_omp(const double* a, const double* dc, double* db, int m, int k, int n) {
#pragma omp parallel for schedule(static)
  for (int p = 0; p < k; ++p) {
    double* dbp = db + static_cast<size_t>(p) * n;
    for (int i = 0; i < m; ++i) {
      const double av = a[static_cast<size_t>(i) * k + p];
      if (av == 0.0) continue;
      const double* dci = dc + static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j) dbp[j] += av * dci[j];
    }
  }
}

void matmul_acc_b(const double* a, const double* dc, double* db, int m, int k, int n) {
  if (parallel() && k > 1)
    matmul_acc_b_omp(a, dc, db, m, k, n);
  else
    matmul_acc_b_serial(a, dc, db, m, k, n);
}

// ------------------------------------------------------------ elementwise

void add_serial(const double* a, const double* b, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = a[i] + b[i];
}

void add_omp(const double* a, const double* b, double* y, size_t n) {
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) y[i] = a[i] + b[i];
}

void add(const double* a, const double* b, double* y, size_t n) {
  if (parallel() && n > 4096)
    add_omp(a, b, y, n);
  else
    add_serial(a, b, y, n);
}

void sub(const double* a, const double* b, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = a[i] - b[i];
}

void mul_serial(const double* a, const double* b, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}

void mul_omp(const double* a, const double* b, double* y, size_t n) {
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) y[i] = a[i] * b[i];
}

void mul(const double* a, const double* b, double* y, size_t n) {
  if (parallel() && n > 4096)
    mul_omp(a, b, y, n);
  else
    mul_serial(a, b, y, n);
}

void scale(const double* a, double c, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = a[i] * c;
}

void sigmoid_serial(const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}

void sigmoid_omp(const double* x, double* y, size_t n) {
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}

void sigmoid(const double* x, double* y, size_t n) {
  if (parallel() && n > 2048)
    sigmoid_omp(x, y, n);
  else
    sigmoid_serial(x, y, n);
}

void tanh_map(const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}

void relu(const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

// -------------------------------------------------------------- row maps

static void softmax_one_row(const double* x, double* y, int c) {
  double mx = x[0];
  for (int j = 1; j < c; ++j) mx = std::max(mx, x[j]);
  double z = 0.0;
  for (int j = 0; j < c; ++j) {
    y[j] = std::exp(x[j] - mx);
    z += y[j];
  }
  const double inv = 1.0 / z;
  for (int j = 0; j < c; ++j) y[j] *= inv;
}

void softmax_rows_serial(const double* x, double* y, int r, int c) {
  for (int i = 0; i < r; ++i)
    softmax_one_row(x + static_cast<size_t>(i) * c, y + static_cast<size_t>(i) * c, c);
}

void softmax_rows_omp(const double* x, double* y, int r, int c) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < r; ++i)
    softmax_one_row(x + static_cast<size_t>(i) * c, y + static_cast<size_t>(i) * c, c);
}

void softmax_rows(const double* x, double* y, int r, int c) {
  if (parallel() && r > 1)
    softmax_rows_omp(x, y, r, c);
  else
    softmax_rows_serial(x, y, r, c);
}

void logsumexp_rows_serial(const double* x, double* y, int r, int c) {
  for (int i = 0; i < r; ++i) {
    const double* xi = x + static_cast<size_t>(i) * c;
    double mx = xi[0];
    for (int j = 1; j < c; ++j) mx = std::max(mx, xi[j]);
    double z = 0.0;
    for (int j = 0; j < c; ++j) z += std::exp(xi[j] - mx);
    y[i] = mx + std::log(z);
  }
}

void logsumexp_rows(const double* x, double* y, int r, int c) {
  logsumexp_rows_serial(x, y, r, c);
}

}  // namespace coref::kern
