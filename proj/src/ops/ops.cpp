#include "swr/ops/ops.hpp"

#include <cmath>
#include <stdexcept>

#include "swr/kernels/kernels.hpp"

namespace swr::ops {

namespace k = swr::kernels;

Matrix matmul(const Matrix& a, const Matrix& b) {
  require_shape(a.cols == b.rows, "matmul", a, b);
  Matrix c(a.rows, b.cols);
  k::matmul(a.data.data(), b.data.data(), c.data.data(), a.rows, a.cols,
            b.cols);
  return c;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  require_shape(a.rows == b.rows, "matmul_at_b", a, b);
  Matrix c(a.cols, b.cols);
  k::matmul_at_b(a.data.data(), b.data.data(), c.data.data(), a.rows, a.cols,
                 b.cols);
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t c = 0; c < a.cols; ++c) t(c, r) = a(r, c);
  return t;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  require_shape(a.cols == b.cols, "matmul_a_bt", a, b);
  // Transpose is exact, so reusing the vectorized matmul keeps the canonical
  // ascending reduction order.
  return matmul(a, transpose(b));
}

Matrix linear(const Matrix& x, const Matrix& w, const Matrix& b) {
  require_shape(x.cols == w.rows, "linear", x, w);
  require_shape(b.rows == 1 && b.cols == w.cols, "linear bias", b, w);
  Matrix y = matmul(x, w);
  k::add_bias_rows(y.data.data(), b.data.data(), y.rows, y.cols);
  return y;
}

LinearGrads linear_backward(const Matrix& x, const Matrix& w,
                            const Matrix& dy) {
  require_shape(dy.rows == x.rows && dy.cols == w.cols, "linear_backward", dy,
                w);
  LinearGrads g;
  g.dx = matmul_a_bt(dy, w);
  g.dw = matmul_at_b(x, dy);
  g.db = Matrix(1, dy.cols);
  k::col_sums(dy.data.data(), g.db.data.data(), dy.rows, dy.cols);
  return g;
}

namespace {

void check_conv_args(const Matrix& x, const Matrix& kernel, std::size_t k_,
                     std::size_t dilation) {
  if (k_ < 1 || dilation < 1)
    throw std::invalid_argument("conv1d_causal: kernel size and dilation must be >= 1");
  if (x.rows < 1)
    throw std::invalid_argument("conv1d_causal: empty input sequence");
  if (kernel.rows != k_ * x.cols)
    throw std::invalid_argument("conv1d_causal: kernel rows " +
                                std::to_string(kernel.rows) + " != k*cin = " +
                                std::to_string(k_ * x.cols));
}

}  // namespace

Matrix conv1d_causal(const Matrix& x, const Matrix& kernel, std::size_t k_,
                     std::size_t dilation) {
  check_conv_args(x, kernel, k_, dilation);
  Matrix y(x.rows, kernel.cols);
  k::conv1d_forward(x.data.data(), kernel.data.data(), y.data.data(), x.rows,
                    x.cols, kernel.cols, k_, dilation);
  return y;
}

Conv1dGrads conv1d_causal_backward(const Matrix& x, const Matrix& kernel,
                                   std::size_t k_, std::size_t dilation,
                                   const Matrix& dy) {
  check_conv_args(x, kernel, k_, dilation);
  require_shape(dy.rows == x.rows && dy.cols == kernel.cols,
                "conv1d_causal_backward", dy, kernel);
  const std::size_t cin = x.cols;
  const std::size_t cout = kernel.cols;

  // Tap-wise kernel transpose; a pure copy, no arithmetic.
  Matrix kt(k_ * cout, cin);
  for (std::size_t i = 0; i < k_; ++i)
    for (std::size_t c = 0; c < cin; ++c)
      for (std::size_t o = 0; o < cout; ++o)
        kt(i * cout + o, c) = kernel(i * cin + c, o);

  Conv1dGrads g;
  g.dx = Matrix(x.rows, cin);
  k::conv1d_backward_input(dy.data.data(), kt.data.data(), g.dx.data.data(),
                           x.rows, cin, cout, k_, dilation);
  g.dkernel = Matrix(kernel.rows, kernel.cols);
  k::conv1d_backward_kernel(x.data.data(), dy.data.data(),
                            g.dkernel.data.data(), x.rows, cin, cout, k_,
                            dilation);
  return g;
}

Matrix relu(const Matrix& x) {
  Matrix y(x.rows, x.cols);
  k::relu_forward(x.data.data(), y.data.data(), x.size());
  return y;
}

Matrix relu_backward(const Matrix& x, const Matrix& dy) {
  require_shape(x.same_shape(dy), "relu_backward", x, dy);
  Matrix dx(x.rows, x.cols);
  k::relu_backward(x.data.data(), dy.data.data(), dx.data.data(), x.size());
  return dx;
}

Matrix sigmoid(const Matrix& x) {
  Matrix y(x.rows, x.cols);
  for (std::size_t i = 0; i < x.size(); ++i)
    y.data[i] = 1.0 / (1.0 + std::exp(-x.data[i]));
  return y;
}

Matrix sigmoid_backward(const Matrix& y, const Matrix& dy) {
  require_shape(y.same_shape(dy), "sigmoid_backward", y, dy);
  Matrix dx(y.rows, y.cols);
  for (std::size_t i = 0; i < y.size(); ++i)
    dx.data[i] = dy.data[i] * y.data[i] * (1.0 - y.data[i]);
  return dx;
}

Matrix tanh(const Matrix& x) {
  Matrix y(x.rows, x.cols);
  for (std::size_t i = 0; i < x.size(); ++i) y.data[i] = std::tanh(x.data[i]);
  return y;
}

Matrix tanh_backward(const Matrix& y, const Matrix& dy) {
  require_shape(y.same_shape(dy), "tanh_backward", y, dy);
  Matrix dx(y.rows, y.cols);
  for (std::size_t i = 0; i < y.size(); ++i)
    dx.data[i] = dy.data[i] * (1.0 - y.data[i] * y.data[i]);
  return dx;
}

Matrix softmax_rows(const Matrix& x) {
  if (x.cols < 1)
    throw std::invalid_argument("softmax_rows: need at least one column");
  Matrix y(x.rows, x.cols);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const double* xrow = x.row(r);
    double* yrow = y.row(r);
    double mx = xrow[0];
    for (std::size_t j = 1; j < x.cols; ++j) mx = std::max(mx, xrow[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < x.cols; ++j) {
      yrow[j] = std::exp(xrow[j] - mx);
      sum += yrow[j];
    }
    for (std::size_t j = 0; j < x.cols; ++j) yrow[j] /= sum;
  }
  return y;
}

Matrix softmax_rows_backward(const Matrix& y, const Matrix& dy) {
  require_shape(y.same_shape(dy), "softmax_rows_backward", y, dy);
  Matrix dx(y.rows, y.cols);
  for (std::size_t r = 0; r < y.rows; ++r) {
    const double* yrow = y.row(r);
    const double* dyrow = dy.row(r);
    double dot = 0.0;
    for (std::size_t j = 0; j < y.cols; ++j) dot += dyrow[j] * yrow[j];
    double* dxrow = dx.row(r);
    for (std::size_t j = 0; j < y.cols; ++j)
      dxrow[j] = yrow[j] * (dyrow[j] - dot);
  }
  return dx;
}

Matrix activation(const Matrix& x, Activation kind) {
  switch (kind) {
    case Activation::kRelu: return relu(x);
    case Activation::kSigmoid: return sigmoid(x);
    case Activation::kTanh: return tanh(x);
    case Activation::kSoftmaxRows: return softmax_rows(x);
  }
  throw std::invalid_argument("activation: unknown kind");
}

}  // namespace swr::ops
