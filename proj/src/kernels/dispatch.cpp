#include "swr/kernels/kernels.hpp"

#include <atomic>
#include <stdexcept>

#include "kernels_impl.hpp"

namespace swr::kernels {

Backend detect_backend() {
#if defined(SWR_KERNELS_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) return Backend::kAvx2;
#endif
#if defined(SWR_KERNELS_HAVE_NEON)
  return Backend::kNeon;
#endif
  return Backend::kScalar;
}

namespace {
std::atomic<Backend> g_backend{detect_backend()};
}

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  switch (b) {
    case Backend::kScalar:
      break;
    case Backend::kAvx2:
#if !defined(SWR_KERNELS_HAVE_AVX2)
      throw std::runtime_error("AVX2 kernels not compiled in");
#else
      if (!__builtin_cpu_supports("avx2"))
        throw std::runtime_error("CPU does not support AVX2");
      break;
#endif
    case Backend::kNeon:
#if !defined(SWR_KERNELS_HAVE_NEON)
      throw std::runtime_error("NEON kernels not compiled in");
#else
      break;
#endif
  }
  g_backend.store(b, std::memory_order_relaxed);
}

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar: return "scalar";
    case Backend::kAvx2: return "avx2";
    case Backend::kNeon: return "neon";
  }
  return "unknown";
}

// Dispatch boilerplate: forward to the active backend's namespace.
#if defined(SWR_KERNELS_HAVE_AVX2)
#define SWR_DISPATCH(fn, ...)                                        \
  switch (active_backend()) {                                        \
    case Backend::kAvx2: avx2::fn(__VA_ARGS__); return;              \
    default: scalar::fn(__VA_ARGS__); return;                        \
  }
#elif defined(SWR_KERNELS_HAVE_NEON)
#define SWR_DISPATCH(fn, ...)                                        \
  switch (active_backend()) {                                        \
    case Backend::kNeon: neon::fn(__VA_ARGS__); return;              \
    default: scalar::fn(__VA_ARGS__); return;                        \
  }
#else
#define SWR_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n) {
  SWR_DISPATCH(matmul, a, b, c, m, k, n);
}

void matmul_at_b(const double* a, const double* b, double* c, std::size_t k,
                 std::size_t m, std::size_t n) {
  SWR_DISPATCH(matmul_at_b, a, b, c, k, m, n);
}

void add_bias_rows(double* y, const double* bias, std::size_t rows,
                   std::size_t cols) {
  SWR_DISPATCH(add_bias_rows, y, bias, rows, cols);
}

void col_sums(const double* a, double* out, std::size_t rows,
              std::size_t cols) {
  SWR_DISPATCH(col_sums, a, out, rows, cols);
}

void conv1d_forward(const double* x, const double* kernel, double* y,
                    std::size_t t_len, std::size_t cin, std::size_t cout,
                    std::size_t k, std::size_t dilation) {
  SWR_DISPATCH(conv1d_forward, x, kernel, y, t_len, cin, cout, k, dilation);
}

void conv1d_backward_input(const double* dy, const double* kt, double* dx,
                           std::size_t t_len, std::size_t cin,
                           std::size_t cout, std::size_t k,
                           std::size_t dilation) {
  SWR_DISPATCH(conv1d_backward_input, dy, kt, dx, t_len, cin, cout, k,
               dilation);
}

void conv1d_backward_kernel(const double* x, const double* dy, double* dk,
                            std::size_t t_len, std::size_t cin,
                            std::size_t cout, std::size_t k,
                            std::size_t dilation) {
  SWR_DISPATCH(conv1d_backward_kernel, x, dy, dk, t_len, cin, cout, k,
               dilation);
}

void relu_forward(const double* x, double* y, std::size_t n) {
  SWR_DISPATCH(relu_forward, x, y, n);
}

void relu_backward(const double* x, const double* dy, double* dx,
                   std::size_t n) {
  SWR_DISPATCH(relu_backward, x, dy, dx, n);
}

void add(const double* a, const double* b, double* c, std::size_t n) {
  SWR_DISPATCH(add, a, b, c, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  SWR_DISPATCH(axpy, alpha, x, y, n);
}

void scale(double alpha, double* x, std::size_t n) {
  SWR_DISPATCH(scale, alpha, x, n);
}

void adam_update(double* theta, double* m, double* v, const double* g,
                 std::size_t n, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2) {
  SWR_DISPATCH(adam_update, theta, m, v, g, n, lr, beta1, beta2, eps, bc1,
               bc2);
}

#undef SWR_DISPATCH

}  // namespace swr::kernels
