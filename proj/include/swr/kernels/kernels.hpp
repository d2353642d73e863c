#pragma once

#include <cstddef>
#include <string>

namespace swr::kernels {

// Dense inner-loop kernels behind the whole stack. Every kernel exists as a
// scalar reference and, where the memory layout allows it, as an AVX2 (x86-64)
// or NEON (aarch64) variant selected at runtime.
//
// Determinism contract: for each output element the reduction runs in a fixed
// ascending index order, SIMD lanes only ever span *independent* output
// elements, and no fused multiply-add is used. Under that rule every variant
// produces bit-identical results, which the test suite checks by memcmp on
// random shapes. Transcendental math (exp, tanh) stays scalar and lives in
// the ops layer, not here.

enum class Backend { kScalar, kAvx2, kNeon };

// Best backend supported by the running CPU.
Backend detect_backend();

// Backend used by subsequent kernel calls; defaults to detect_backend().
Backend active_backend();
void set_backend(Backend b);

std::string backend_name(Backend b);

// C[m x n] = A[m x k] * B[k x n], C overwritten.
void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n);

// C[m x n] = A^T * B with A[k x m], B[k x n], C overwritten.
void matmul_at_b(const double* a, const double* b, double* c, std::size_t k,
                 std::size_t m, std::size_t n);

// Y[r x n] += bias[n] per row.
void add_bias_rows(double* y, const double* bias, std::size_t rows,
                   std::size_t cols);

// out[n] = column sums of A[r x n].
void col_sums(const double* a, double* out, std::size_t rows,
              std::size_t cols);

// Causal dilated 1-D convolution over a [T x cin] sequence.
// Weights are laid out as K[(tap * cin + c) * cout + o]; tap i reaches back
// (k-1-i)*dilation rows, rows before the sequence start count as zero.
void conv1d_forward(const double* x, const double* kernel, double* y,
                    std::size_t t_len, std::size_t cin, std::size_t cout,
                    std::size_t k, std::size_t dilation);

// dX for the convolution above. kt is the tap-wise transposed kernel,
// kt[(tap * cout + o) * cin + c] == kernel[(tap * cin + c) * cout + o].
void conv1d_backward_input(const double* dy, const double* kt, double* dx,
                           std::size_t t_len, std::size_t cin,
                           std::size_t cout, std::size_t k,
                           std::size_t dilation);

// dK for the convolution above, overwritten.
void conv1d_backward_kernel(const double* x, const double* dy, double* dk,
                            std::size_t t_len, std::size_t cin,
                            std::size_t cout, std::size_t k,
                            std::size_t dilation);

// Elementwise.
void relu_forward(const double* x, double* y, std::size_t n);
void relu_backward(const double* x, const double* dy, double* dx,
                   std::size_t n);
void add(const double* a, const double* b, double* c, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);

// One Adam step over a flat parameter block. bc1/bc2 are the bias-correction
// denominators 1-beta1^t and 1-beta2^t, computed once by the caller.
void adam_update(double* theta, double* m, double* v, const double* g,
                 std::size_t n, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2);

}  // namespace swr::kernels
