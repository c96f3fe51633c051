#pragma once

#include <cstddef>

namespace coref::kern {

// Thread control for the OpenMP kernels. n <= 1 routes every dispatching
// kernel to the serial reference path. The parallel variants split work
// only across independent output elements, so serial and parallel results
// are bit-identical; the serial versions stay around as the reference the
// tests and the benchmark compare against.
void set_threads(int n);
int threads();

// C(m x n) = A(m x k) * B(k x n), row-major.
void matmul_serial(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_omp(const double* a, const double* b, double* c, int m, int k, int n);
void matmul(const double* a, const double* b, double* c, int m, int k, int n);

// C += A^T * dC convenience used by backward passes:
// da(m x k) += dc(m x n) * b^T(n x k)
void matmul_acc_a_serial(const double* dc, const double* b, double* da, int m, int k, int n);
void matmul_acc_a_omp(const double* dc, const double* b, double* da, int m, int k, int n);
void matmul_acc_a(const double* dc, const double* b, double* da, int m, int k, int n);
// db(k x n) += a^T(k x m) * dc(m x n)
void matmul_acc_b_serial(const double* a, const double* dc, double* db, int m, int k, int n);
void matmul_acc_b_omp(const double* a, const double* dc, double* db, int m, int k, int n);
void matmul_acc_b(const double* a, const double* dc, double* db, int m, int k, int n);

// Elementwise maps over n entries.
void add_serial(const double* a, const double* b, double* y, size_t n);
void add_omp(const double* a, const double* b, double* y, size_t n);
void add(const double* a, const double* b, double* y, size_t n);

void sub(const double* a, const double* b, double* y, size_t n);
void mul_serial(const double* a, const double* b, double* y, size_t n);
void mul_omp(const double* a, const double* b, double* y, size_t n);
void mul(const double* a, const double* b, double* y, size_t n);
void scale(const double* a, double c, double* y, size_t n);

void sigmoid_serial(const double* x, double* y, size_t n);
void sigmoid_omp(const double* x, double* y, size_t n);
void sigmoid(const double* x, double* y, size_t n);
void tanh_map(const double* x, double* y, size_t n);
void relu(const double* x, double* y, size_t n);

// Row-wise softmax / log-sum-exp with max subtraction, r rows of c columns.
// logsumexp writes one value per row.
void softmax_rows_serial(const double* x, double* y, int r, int c);
void softmax_rows_omp(const double* x, double* y, int r, int c);
void softmax_rows(const double* x, double* y, int r, int c);
void logsumexp_rows_serial(const double* x, double* y, int r, int c);
void logsumexp_rows(const double* x, double* y, int r, int c);

}  // namespace coref::kern
