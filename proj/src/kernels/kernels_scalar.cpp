// Scalar reference kernels. These define the canonical operation order that
// the SIMD variants must reproduce bit-exactly: reductions run in ascending
// index order per output element, multiplies and adds round separately.

#include <cmath>
#include <cstring>

#include "kernels_impl.hpp"

namespace swr::kernels::scalar {

void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    std::memset(crow, 0, n * sizeof(double));
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void matmul_at_b(const double* a, const double* b, double* c, std::size_t k,
                 std::size_t m, std::size_t n) {
  std::memset(c, 0, m * n * sizeof(double));
  for (std::size_t p = 0; p < k; ++p) {
    const double* arow = a + p * m;
    const double* brow = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = arow[i];
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void add_bias_rows(double* y, const double* bias, std::size_t rows,
                   std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* yrow = y + r * cols;
    for (std::size_t j = 0; j < cols; ++j) yrow[j] += bias[j];
  }
}

void col_sums(const double* a, double* out, std::size_t rows,
              std::size_t cols) {
  std::memset(out, 0, cols * sizeof(double));
  for (std::size_t r = 0; r < rows; ++r) {
    const double* arow = a + r * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] += arow[j];
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
      for (std::size_t c = 0; c < cin; ++c) {
        const double xv = xrow[c];
        const double* krow = kernel + (i * cin + c) * cout;
        for (std::size_t o = 0; o < cout; ++o) yrow[o] += xv * krow[o];
      }
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
      for (std::size_t o = 0; o < cout; ++o) {
        const double g = dyrow[o];
        const double* ktrow = kt + (i * cout + o) * cin;
        for (std::size_t c = 0; c < cin; ++c) dxrow[c] += g * ktrow[c];
      }
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
      for (std::size_t c = 0; c < cin; ++c) {
        const double xv = xrow[c];
        double* dkrow = dk + (i * cin + c) * cout;
        for (std::size_t o = 0; o < cout; ++o) dkrow[o] += xv * dyrow[o];
      }
    }
  }
}

void relu_forward(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(const double* x, const double* dy, double* dx,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
}

void add(const double* a, const double* b, double* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) c[i] = a[i] + b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void adam_update(double* theta, double* m, double* v, const double* g,
                 std::size_t n, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2) {
  const double one_minus_b1 = 1.0 - beta1;
  const double one_minus_b2 = 1.0 - beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = g[i];
    const double mi = beta1 * m[i] + one_minus_b1 * gi;
    const double vi = beta2 * v[i] + one_minus_b2 * (gi * gi);
    m[i] = mi;
    v[i] = vi;
    theta[i] -= lr * ((mi / bc1) / (std::sqrt(vi / bc2) + eps));
  }
}

}  // namespace swr::kernels::scalar
