#include "swr/train/loss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace swr::train {

LossResult cross_entropy(const Matrix& scores,
                         const std::vector<std::uint16_t>& labels) {
  const std::size_t t_len = scores.rows, c = scores.cols;
  if (labels.size() != t_len)
    throw std::invalid_argument(
        "cross_entropy: " + std::to_string(labels.size()) + " labels for " +
        std::to_string(t_len) + " score rows");
  if (t_len == 0 || c == 0)
    throw std::invalid_argument("cross_entropy: empty scores");

  LossResult r;
  r.dscores = Matrix(t_len, c);
  const double inv_t = 1.0 / static_cast<double>(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    if (labels[t] >= c)
      throw std::invalid_argument(
          "cross_entropy: frame " + std::to_string(t) + ": label " +
          std::to_string(labels[t]) + " out of range [0, " + std::to_string(c) +
          ")");
    const double* x = scores.row(t);
    double m = x[0];
    for (std::size_t j = 1; j < c; ++j) m = std::max(m, x[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) sum += std::exp(x[j] - m);
    const double lse = m + std::log(sum);
    r.loss += (lse - x[labels[t]]) * inv_t;
    double* d = r.dscores.row(t);
    for (std::size_t j = 0; j < c; ++j) d[j] = std::exp(x[j] - lse) * inv_t;
    d[labels[t]] -= inv_t;
  }
  return r;
}

LossResult binary_cross_entropy(const Matrix& scores,
                                const std::vector<std::uint8_t>& mask) {
  const std::size_t t_len = scores.rows, c = scores.cols;
  if (mask.size() != t_len * c)
    throw std::invalid_argument(
        "binary_cross_entropy: mask has " + std::to_string(mask.size()) +
        " cells for " + std::to_string(t_len) + "x" + std::to_string(c) +
        " scores");
  if (t_len == 0 || c == 0)
    throw std::invalid_argument("binary_cross_entropy: empty scores");

  LossResult r;
  r.dscores = Matrix(t_len, c);
  const double inv_n = 1.0 / static_cast<double>(t_len * c);
  for (std::size_t t = 0; t < t_len; ++t)
    for (std::size_t j = 0; j < c; ++j) {
      const std::uint8_t y = mask[t * c + j];
      if (y > 1)
        throw std::invalid_argument(
            "binary_cross_entropy: frame " + std::to_string(t) + ", class " +
            std::to_string(j) + ": mask value " + std::to_string(y) +
            " is not 0/1");
      const double x = scores(t, j);
      const double cell = std::max(x, 0.0) - x * static_cast<double>(y) +
                          std::log1p(std::exp(-std::abs(x)));
      r.loss += cell * inv_n;
      const double sig =
          x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                   : std::exp(x) / (1.0 + std::exp(x));
      r.dscores(t, j) = (sig - static_cast<double>(y)) * inv_n;
    }
  return r;
}

SequenceLoss sequence_loss(const std::vector<Matrix>& stage_scores,
                           const data::LabelTrack& labels) {
  if (stage_scores.empty())
    throw std::invalid_argument("sequence_loss: no stage scores");
  SequenceLoss out;
  for (const Matrix& s : stage_scores) {
    LossResult r = labels.mode == data::LabelMode::kMulticlass
                       ? cross_entropy(s, labels.classes)
                       : binary_cross_entropy(s, labels.mask);
    out.loss += r.loss;
    out.dscores.push_back(std::move(r.dscores));
  }
  return out;
}

}  // namespace swr::train
