// NEON kernel variants (aarch64, 2 doubles per vector). Same bit-exactness
// rule as the AVX2 file: lanes cover independent outputs, reductions keep the
// scalar order, vmulq/vaddq instead of fused multiply-add.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstring>

#include "kernels_impl.hpp"

namespace swr::kernels::neon {

namespace {

inline void axpy_row(double a, const double* b, double* c, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    float64x2_t acc = vld1q_f64(c + j);
    acc = vaddq_f64(acc, vmulq_f64(av, vld1q_f64(b + j)));
    vst1q_f64(c + j, acc);
  }
  for (; j < n; ++j) c[j] += a * b[j];
}

}  // namespace

void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    std::memset(crow, 0, n * sizeof(double));
    for (std::size_t p = 0; p < k; ++p)
      axpy_row(a[i * k + p], b + p * n, crow, n);
  }
}

void matmul_at_b(const double* a, const double* b, double* c, std::size_t k,
                 std::size_t m, std::size_t n) {
  std::memset(c, 0, m * n * sizeof(double));
  for (std::size_t p = 0; p < k; ++p) {
    const double* arow = a + p * m;
    const double* brow = b + p * n;
    for (std::size_t i = 0; i < m; ++i) axpy_row(arow[i], brow, c + i * n, n);
  }
}

void add_bias_rows(double* y, const double* bias, std::size_t rows,
                   std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* yrow = y + r * cols;
    std::size_t j = 0;
    for (; j + 2 <= cols; j += 2)
      vst1q_f64(yrow + j, vaddq_f64(vld1q_f64(yrow + j), vld1q_f64(bias + j)));
    for (; j < cols; ++j) yrow[j] += bias[j];
  }
}

void col_sums(const double* a, double* out, std::size_t rows,
              std::size_t cols) {
  std::memset(out, 0, cols * sizeof(double));
  for (std::size_t r = 0; r < rows; ++r) {
    const double* arow = a + r * cols;
    std::size_t j = 0;
    for (; j + 2 <= cols; j += 2)
      vst1q_f64(out + j, vaddq_f64(vld1q_f64(out + j), vld1q_f64(arow + j)));
    for (; j < cols; ++j) out[j] += arow[j];
  }
}

void conv1d_forward(const double* x, const double* kernel, double* y,
                    std::size_t t_len, std::size_t cin, std::size_t cout,
                    std::size_t k, std::size_t dilation) {
  for (std::size_t t = 0; t < t_len; ++t) {
    double* yrow = y + t * cout;
    std::memset(yrow, 0, cout * sizeof(double));
    for (std::size_t i = 0; i < k; ++i) {
      const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(t) -
                               static_cast<std::ptrdiff_t>((k - 1 - i) * dilation);
      if (s < 0) continue;
      const double* xrow = x + static_cast<std::size_t>(s) * cin;
      for (std::size_t c = 0; c < cin; ++c)
        axpy_row(xrow[c], kernel + (i * cin + c) * cout, yrow, cout);
    }
  }
}

void conv1d_backward_input(const double* dy, const double* kt, double* dx,
                           std::size_t t_len, std::size_t cin,
                           std::size_t cout, std::size_t k,
                           std::size_t dilation) {
  for (std::size_t s = 0; s < t_len; ++s) {
    double* dxrow = dx + s * cin;
    std::memset(dxrow, 0, cin * sizeof(double));
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t t = s + (k - 1 - i) * dilation;
      if (t >= t_len) continue;
      const double* dyrow = dy + t * cout;
      for (std::size_t o = 0; o < cout; ++o)
        axpy_row(dyrow[o], kt + (i * cout + o) * cin, dxrow, cin);
    }
  }
}

void conv1d_backward_kernel(const double* x, const double* dy, double* dk,
                            std::size_t t_len, std::size_t cin,
                            std::size_t cout, std::size_t k,
                            std::size_t dilation) {
  std::memset(dk, 0, k * cin * cout * sizeof(double));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t t = 0; t < t_len; ++t) {
      const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(t) -
                               static_cast<std::ptrdiff_t>((k - 1 - i) * dilation);
      if (s < 0) continue;
      const double* xrow = x + static_cast<std::size_t>(s) * cin;
      const double* dyrow = dy + t * cout;
      for (std::size_t c = 0; c < cin; ++c)
        axpy_row(xrow[c], dyrow, dk + (i * cin + c) * cout, cout);
    }
  }
}

void relu_forward(const double* x, double* y, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xv = vld1q_f64(x + i);
    const uint64x2_t gt = vcgtq_f64(xv, zero);
    vst1q_f64(y + i, vbslq_f64(gt, xv, zero));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(const double* x, const double* dy, double* dx,
                   std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t gt = vcgtq_f64(vld1q_f64(x + i), zero);
    vst1q_f64(dx + i, vbslq_f64(gt, vld1q_f64(dy + i), zero));
  }
  for (; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
}

void add(const double* a, const double* b, double* c, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(c + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) c[i] = a[i] + b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  axpy_row(alpha, x, y, n);
}

void scale(double alpha, double* x, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(x + i, vmulq_f64(av, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void adam_update(double* theta, double* m, double* v, const double* g,
                 std::size_t n, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2) {
  const double one_minus_b1 = 1.0 - beta1;
  const double one_minus_b2 = 1.0 - beta2;
  const float64x2_t b1v = vdupq_n_f64(beta1);
  const float64x2_t b2v = vdupq_n_f64(beta2);
  const float64x2_t omb1 = vdupq_n_f64(one_minus_b1);
  const float64x2_t omb2 = vdupq_n_f64(one_minus_b2);
  const float64x2_t lrv = vdupq_n_f64(lr);
  const float64x2_t epsv = vdupq_n_f64(eps);
  const float64x2_t bc1v = vdupq_n_f64(bc1);
  const float64x2_t bc2v = vdupq_n_f64(bc2);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t gi = vld1q_f64(g + i);
    const float64x2_t mi =
        vaddq_f64(vmulq_f64(b1v, vld1q_f64(m + i)), vmulq_f64(omb1, gi));
    const float64x2_t vi = vaddq_f64(vmulq_f64(b2v, vld1q_f64(v + i)),
                                     vmulq_f64(omb2, vmulq_f64(gi, gi)));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t mhat = vdivq_f64(mi, bc1v);
    const float64x2_t denom =
        vaddq_f64(vsqrtq_f64(vdivq_f64(vi, bc2v)), epsv);
    const float64x2_t step = vmulq_f64(lrv, vdivq_f64(mhat, denom));
    vst1q_f64(theta + i, vsubq_f64(vld1q_f64(theta + i), step));
  }
  for (; i < n; ++i) {
    const double gi = g[i];
    const double mi = beta1 * m[i] + one_minus_b1 * gi;
    const double vi = beta2 * v[i] + one_minus_b2 * (gi * gi);
    m[i] = mi;
    v[i] = vi;
    theta[i] -= lr * ((mi / bc1) / (std::sqrt(vi / bc2) + eps));
  }
}

}  // namespace swr::kernels::neon

#endif  // aarch64
