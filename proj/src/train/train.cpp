#include "swr/train/train.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "swr/core/rng.hpp"
#include "swr/kernels/kernels.hpp"
#include "swr/train/loss.hpp"

namespace swr::train {

double lr_at(const TrainConfig& cfg, std::size_t epoch) {
  if (cfg.lr_interval == 0) return cfg.lr;
  return cfg.lr * std::pow(cfg.lr_decay,
                           static_cast<double>(epoch / cfg.lr_interval));
}

AdamState::AdamState(const ParamStore& params) {
  for (const auto& p : params.entries()) {
    m_.emplace_back(p.value.rows, p.value.cols);
    v_.emplace_back(p.value.rows, p.value.cols);
  }
}

void AdamState::step(ParamStore& params, double lr, const TrainConfig& cfg) {
  if (params.size() != m_.size())
    throw std::invalid_argument(
        "AdamState: store has " + std::to_string(params.size()) +
        " parameters, state was built for " + std::to_string(m_.size()));
  ++steps_;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = params.entries()[i];
    if (!p.grad.all_finite())
      throw std::runtime_error("AdamState: non-finite gradient in \"" + p.name +
                               "\"");
    kernels::adam_update(p.value.data.data(), m_[i].data.data(),
                         v_[i].data.data(), p.grad.data.data(), p.value.size(),
                         lr, cfg.beta1, cfg.beta2, cfg.eps, bc1, bc2);
  }
  params.zero_grads();
}

namespace {

void check_training_set(const models::ModelSpec& spec,
                        const std::vector<data::Video>& videos) {
  if (videos.empty())
    throw std::invalid_argument("train: empty training set");
  for (const auto& v : videos) {
    const std::string who = "train: video " + v.seq.video_id;
    if (v.seq.features.rows == 0)
      throw std::invalid_argument(who + " has no frames");
    if (v.seq.features.cols != spec.feature_dim)
      throw std::invalid_argument(
          who + ": feature dim " + std::to_string(v.seq.features.cols) +
          " != model feature_dim " + std::to_string(spec.feature_dim));
    if (v.labels.num_classes != spec.num_classes)
      throw std::invalid_argument(
          who + ": " + std::to_string(v.labels.num_classes) +
          " classes != model num_classes " + std::to_string(spec.num_classes));
    if ((v.labels.mode == data::LabelMode::kMulticlass) !=
        (spec.label_mode == models::LabelMode::kMulticlass))
      throw std::invalid_argument(who + ": label mode differs from the model");
    if (v.labels.length() != v.seq.features.rows)
      throw std::invalid_argument(
          who + ": " + std::to_string(v.labels.length()) + " label frames for " +
          std::to_string(v.seq.features.rows) + " feature rows");
  }
}

// One optimizer step per whole video sequence.
double sequence_epoch(const models::ModelSpec& spec, ParamStore& params,
                      const std::vector<data::Video>& videos,
                      AdamState& adam, double lr, const TrainConfig& cfg,
                      Rng& order) {
  std::vector<std::size_t> idx(videos.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  order.shuffle(idx);
  double loss_sum = 0.0;
  for (std::size_t i : idx) {
    const data::Video& v = videos[i];
    models::Trace tr;
    const std::vector<Matrix> scores =
        models::model_forward(spec, params, v.seq.features, tr);
    SequenceLoss l = sequence_loss(scores, v.labels);
    models::model_backward(spec, params, tr, l.dscores);
    adam.step(params, lr, cfg);
    loss_sum += l.loss;
  }
  return loss_sum / static_cast<double>(videos.size());
}

// Frame-mlp sees every frame independently: pool them across videos and take
// one step per shuffled minibatch.
double pooled_frame_epoch(const models::ModelSpec& spec, ParamStore& params,
                          const std::vector<data::Video>& videos,
                          AdamState& adam, double lr, const TrainConfig& cfg,
                          Rng& order,
                          const std::vector<std::pair<std::size_t, std::size_t>>&
                              all_frames) {
  std::vector<std::size_t> idx(all_frames.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  order.shuffle(idx);
  const std::size_t batch = cfg.frame_batch ? cfg.frame_batch : 1;
  const std::size_t c = spec.num_classes;
  double loss_sum = 0.0;
  std::size_t steps = 0;
  for (std::size_t begin = 0; begin < idx.size(); begin += batch) {
    const std::size_t n = std::min(batch, idx.size() - begin);
    Matrix x(n, spec.feature_dim);
    std::vector<std::uint16_t> ylab(spec.label_mode ==
                                            models::LabelMode::kMulticlass
                                        ? n
                                        : 0);
    std::vector<std::uint8_t> ymask(
        spec.label_mode == models::LabelMode::kMultilabel ? n * c : 0);
    for (std::size_t b = 0; b < n; ++b) {
      const auto [vi, t] = all_frames[idx[begin + b]];
      const data::Video& v = videos[vi];
      for (std::size_t j = 0; j < spec.feature_dim; ++j)
        x(b, j) = v.seq.features(t, j);
      if (spec.label_mode == models::LabelMode::kMulticlass)
        ylab[b] = v.labels.classes[t];
      else
        for (std::size_t j = 0; j < c; ++j)
          ymask[b * c + j] = v.labels.mask[t * c + j];
    }
    models::Trace tr;
    const std::vector<Matrix> scores = models::model_forward(spec, params, x, tr);
    LossResult l = spec.label_mode == models::LabelMode::kMulticlass
                       ? cross_entropy(scores[0], ylab)
                       : binary_cross_entropy(scores[0], ymask);
    std::vector<Matrix> ds;
    ds.push_back(std::move(l.dscores));
    models::model_backward(spec, params, tr, ds);
    adam.step(params, lr, cfg);
    loss_sum += l.loss;
    ++steps;
  }
  return steps ? loss_sum / static_cast<double>(steps) : 0.0;
}

}  // namespace

std::vector<EpochStats> train(const models::ModelSpec& spec, ParamStore& params,
                              const std::vector<data::Video>& videos,
                              const TrainConfig& cfg) {
  check_training_set(spec, videos);
  AdamState adam(params);
  std::vector<std::pair<std::size_t, std::size_t>> all_frames;
  if (spec.kind == models::ModelKind::kFrameMlp)
    for (std::size_t vi = 0; vi < videos.size(); ++vi)
      for (std::size_t t = 0; t < videos[vi].seq.features.rows; ++t)
        all_frames.emplace_back(vi, t);

  std::vector<EpochStats> history;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_at(cfg, epoch);
    Rng order = Rng::derive(cfg.seed, epoch);
    EpochStats s;
    s.epoch = epoch;
    s.lr = lr;
    s.mean_loss =
        spec.kind == models::ModelKind::kFrameMlp
            ? pooled_frame_epoch(spec, params, videos, adam, lr, cfg, order,
                                 all_frames)
            : sequence_epoch(spec, params, videos, adam, lr, cfg, order);
    history.push_back(s);
  }
  return history;
}

}  // namespace swr::train
