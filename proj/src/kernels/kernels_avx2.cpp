// AVX2 kernel variants. Lanes span independent output elements only; every
// per-element reduction keeps the scalar kernels' ascending order, with
// separate multiply and add roundings (no FMA), so results are bit-identical
// to the scalar reference. The equivalence tests enforce this by memcmp.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "kernels_impl.hpp"

namespace swr::kernels::avx2 {

namespace {

// c[0..n) += a * b[0..n) with broadcast scalar a.
inline void axpy_row(double a, const double* b, double* c, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d acc = _mm256_loadu_pd(c + j);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(av, _mm256_loadu_pd(b + j)));
    _mm256_storeu_pd(c + j, acc);
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
    for (; j + 4 <= cols; j += 4) {
      __m256d v = _mm256_add_pd(_mm256_loadu_pd(yrow + j),
                                _mm256_loadu_pd(bias + j));
      _mm256_storeu_pd(yrow + j, v);
    }
    for (; j < cols; ++j) yrow[j] += bias[j];
  }
}

void col_sums(const double* a, double* out, std::size_t rows,
              std::size_t cols) {
  std::memset(out, 0, cols * sizeof(double));
  for (std::size_t r = 0; r < rows; ++r) {
    const double* arow = a + r * cols;
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      __m256d v = _mm256_add_pd(_mm256_loadu_pd(out + j),
                                _mm256_loadu_pd(arow + j));
      _mm256_storeu_pd(out + j, v);
    }
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
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(const double* x, const double* dy, double* dx,
                   std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(dx + i, _mm256_and_pd(mask, _mm256_loadu_pd(dy + i)));
  }
  for (; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
}

void add(const double* a, const double* b, double* c, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        c + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) c[i] = a[i] + b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  axpy_row(alpha, x, y, n);
}

void scale(double alpha, double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void adam_update(double* theta, double* m, double* v, const double* g,
                 std::size_t n, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2) {
  const double one_minus_b1 = 1.0 - beta1;
  const double one_minus_b2 = 1.0 - beta2;
  const __m256d b1v = _mm256_set1_pd(beta1);
  const __m256d b2v = _mm256_set1_pd(beta2);
  const __m256d omb1 = _mm256_set1_pd(one_minus_b1);
  const __m256d omb2 = _mm256_set1_pd(one_minus_b2);
  const __m256d lrv = _mm256_set1_pd(lr);
  const __m256d epsv = _mm256_set1_pd(eps);
  const __m256d bc1v = _mm256_set1_pd(bc1);
  const __m256d bc2v = _mm256_set1_pd(bc2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gi = _mm256_loadu_pd(g + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1v, _mm256_loadu_pd(m + i)),
                                     _mm256_mul_pd(omb1, gi));
    const __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2v, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(omb2, _mm256_mul_pd(gi, gi)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d mhat = _mm256_div_pd(mi, bc1v);
    const __m256d denom =
        _mm256_add_pd(_mm256_sqrt_pd(_mm256_div_pd(vi, bc2v)), epsv);
    const __m256d step = _mm256_mul_pd(lrv, _mm256_div_pd(mhat, denom));
    _mm256_storeu_pd(theta + i,
                     _mm256_sub_pd(_mm256_loadu_pd(theta + i), step));
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

}  // namespace swr::kernels::avx2

#endif  // x86-64
