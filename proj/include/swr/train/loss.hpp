#pragma once

#include <cstdint>
#include <vector>

#include "swr/core/matrix.hpp"
#include "swr/data/dataset.hpp"

namespace swr::train {

struct LossResult {
  double loss = 0.0;
  Matrix dscores;  // dL/dscores, same shape as scores
};

// Mean negative log-likelihood of the labels under row softmax:
//   L = -(1/T) sum_t log softmax(scores[t])[labels[t]]
// dscores = (softmax - onehot) / T. A label outside [0, C) raises
// std::invalid_argument naming the frame.
LossResult cross_entropy(const Matrix& scores,
                         const std::vector<std::uint16_t>& labels);

// Mean per-cell binary cross-entropy of a {0,1} mask (row-major T x C) under
// element-wise sigmoid, in the overflow-safe form
//   l(x, y) = max(x, 0) - x*y + log1p(exp(-|x|));
// dscores = (sigmoid(scores) - mask) / (T*C). A mask value outside {0,1}
// raises std::invalid_argument naming the cell.
LossResult binary_cross_entropy(const Matrix& scores,
                                const std::vector<std::uint8_t>& mask);

struct SequenceLoss {
  double loss = 0.0;               // unweighted sum over stages
  std::vector<Matrix> dscores;     // one per stage, for model_backward
};

// Applies the loss matching labels.mode to every stage's scores against the
// same ground truth and sums; this is the training objective for all kinds
// (single-stage models pass one matrix).
SequenceLoss sequence_loss(const std::vector<Matrix>& stage_scores,
                           const data::LabelTrack& labels);

}  // namespace swr::train
