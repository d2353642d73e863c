#pragma once

#include <cstddef>

#include "swr/core/matrix.hpp"

namespace swr::ops {

// Differentiable primitives. Each forward has an explicit backward that maps
// the output gradient to input/parameter gradients; callers keep whatever the
// backward needs (inputs or outputs). Backward of a zero output gradient is
// zero everywhere, and gradient shapes always equal the shapes they
// differentiate.

// y[t] = x[t] * W + b, with x [T x Din], W [Din x Dout], b [1 x Dout].
Matrix linear(const Matrix& x, const Matrix& w, const Matrix& b);

struct LinearGrads {
  Matrix dx;  // dY * W^T
  Matrix dw;  // x^T * dY
  Matrix db;  // column sums of dY
};
LinearGrads linear_backward(const Matrix& x, const Matrix& w,
                            const Matrix& dy);

// Causal dilated 1-D convolution. x is [T x Cin]; the kernel is stored as a
// [(k*Cin) x Cout] matrix whose row (i*Cin + c) holds tap i, input channel c.
// (k-1)*dilation zero rows are virtually prepended, so output row t draws
// only on input rows t-(k-1)*dilation .. t.
Matrix conv1d_causal(const Matrix& x, const Matrix& kernel, std::size_t k,
                     std::size_t dilation);

struct Conv1dGrads {
  Matrix dx;
  Matrix dkernel;
};
Conv1dGrads conv1d_causal_backward(const Matrix& x, const Matrix& kernel,
                                   std::size_t k, std::size_t dilation,
                                   const Matrix& dy);

// Activations. relu/sigmoid/tanh are elementwise; softmax is per row with
// max subtraction, each output row summing to 1 within 1e-12.
Matrix relu(const Matrix& x);
Matrix relu_backward(const Matrix& x, const Matrix& dy);

Matrix sigmoid(const Matrix& x);
// Backward from the forward output y = sigmoid(x).
Matrix sigmoid_backward(const Matrix& y, const Matrix& dy);

Matrix tanh(const Matrix& x);
Matrix tanh_backward(const Matrix& y, const Matrix& dy);

Matrix softmax_rows(const Matrix& x);
Matrix softmax_rows_backward(const Matrix& y, const Matrix& dy);

enum class Activation { kRelu, kSigmoid, kTanh, kSoftmaxRows };
Matrix activation(const Matrix& x, Activation kind);

// Convenience wrappers with shape checks.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_at_b(const Matrix& a, const Matrix& b);  // A^T * B
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);  // A * B^T
Matrix transpose(const Matrix& a);

}  // namespace swr::ops
