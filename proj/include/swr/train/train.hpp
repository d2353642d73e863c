#pragma once

#include <cstdint>
#include <vector>

#include "swr/core/params.hpp"
#include "swr/data/dataset.hpp"
#include "swr/models/model.hpp"

namespace swr::train {

struct TrainConfig {
  std::size_t epochs = 30;
  double lr = 1e-3;
  double lr_decay = 0.1;         // multiplied in every lr_interval epochs
  std::size_t lr_interval = 10;  // 0 disables the decay schedule
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t frame_batch = 64;  // frame-mlp minibatch size
  std::uint64_t seed = 0;        // orders the training stream
};

// lr * lr_decay^floor(epoch / lr_interval).
double lr_at(const TrainConfig& cfg, std::size_t epoch);

// Adam first/second moments, one slot per parameter in store order.
class AdamState {
 public:
  explicit AdamState(const ParamStore& params);

  std::size_t steps() const { return steps_; }

  // One update of every parameter from its accumulated gradient; gradients
  // are zeroed afterwards. A non-finite gradient raises std::runtime_error
  // naming the parameter.
  void step(ParamStore& params, double lr, const TrainConfig& cfg);

 private:
  std::vector<Matrix> m_, v_;
  std::size_t steps_ = 0;
};

struct EpochStats {
  std::size_t epoch = 0;
  double lr = 0.0;
  double mean_loss = 0.0;  // mean over the epoch's optimizer steps
};

// Adam training on the given videos; returns one entry per epoch (empty for
// epochs = 0, leaving params at their initialization). The visit order is
// reshuffled every epoch from (cfg.seed, epoch). frame-mlp pools all frames
// across videos and draws minibatches of cfg.frame_batch; every other kind
// takes one optimizer step per video sequence. Bit-deterministic in
// (spec, params, videos, cfg), independent of SWR_THREADS.
std::vector<EpochStats> train(const models::ModelSpec& spec, ParamStore& params,
                              const std::vector<data::Video>& videos,
                              const TrainConfig& cfg);

}  // namespace swr::train
