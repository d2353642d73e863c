#pragma once

#include <cstddef>

// Per-backend kernel entry points. Only dispatch.cpp includes this.

namespace swr::kernels {

#define SWR_KERNEL_DECLS(ns)                                                   \
  namespace ns {                                                               \
  void matmul(const double* a, const double* b, double* c, std::size_t m,      \
              std::size_t k, std::size_t n);                                   \
  void matmul_at_b(const double* a, const double* b, double* c,                \
                   std::size_t k, std::size_t m, std::size_t n);               \
  void add_bias_rows(double* y, const double* bias, std::size_t rows,          \
                     std::size_t cols);                                        \
  void col_sums(const double* a, double* out, std::size_t rows,                \
                std::size_t cols);                                             \
  void conv1d_forward(const double* x, const double* kernel, double* y,        \
                      std::size_t t_len, std::size_t cin, std::size_t cout,    \
                      std::size_t k, std::size_t dilation);                    \
  void conv1d_backward_input(const double* dy, const double* kt, double* dx,   \
                             std::size_t t_len, std::size_t cin,               \
                             std::size_t cout, std::size_t k,                  \
                             std::size_t dilation);                            \
  void conv1d_backward_kernel(const double* x, const double* dy, double* dk,   \
                              std::size_t t_len, std::size_t cin,              \
                              std::size_t cout, std::size_t k,                 \
                              std::size_t dilation);                           \
  void relu_forward(const double* x, double* y, std::size_t n);                \
  void relu_backward(const double* x, const double* dy, double* dx,            \
                     std::size_t n);                                           \
  void add(const double* a, const double* b, double* c, std::size_t n);        \
  void axpy(double alpha, const double* x, double* y, std::size_t n);          \
  void scale(double alpha, double* x, std::size_t n);                          \
  void adam_update(double* theta, double* m, double* v, const double* g,       \
                   std::size_t n, double lr, double beta1, double beta2,       \
                   double eps, double bc1, double bc2);                        \
  }

SWR_KERNEL_DECLS(scalar)

#if defined(__x86_64__) || defined(_M_X64)
#define SWR_KERNELS_HAVE_AVX2 1
SWR_KERNEL_DECLS(avx2)
#endif

#if defined(__aarch64__)
#define SWR_KERNELS_HAVE_NEON 1
SWR_KERNEL_DECLS(neon)
#endif

#undef SWR_KERNEL_DECLS

}  // namespace swr::kernels
