#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "swr/data/dataset.hpp"

namespace swr::data {

// Synthetic surgical-workflow generator. Each video walks an ordered phase
// grammar; every frame emits its phase's cluster centroid plus isotropic
// noise. Two ambiguity mechanisms from the challenge taxonomy are injected:
//   local  — occlusions: random spans emitting a dedicated centroid while the
//            label keeps the underlying phase;
//   global — phase pairs sharing one centroid, so their frames are
//            indistinguishable to any frame-level observer.
struct SynthConfig {
  std::size_t num_phases = 7;  // C, in grammar order 0..C-1
  std::size_t feature_dim = 16;
  std::vector<std::pair<std::size_t, std::size_t>> durations;  // per phase [min,max] frames
  std::vector<std::pair<std::size_t, std::size_t>> global_pairs;  // share a centroid
  double occlusion_rate = 0.0;  // per-frame probability of starting a span
  std::size_t occlusion_min = 1, occlusion_max = 1;  // span length range
  double noise_sigma = 0.0;
  std::size_t num_videos = 2;
  std::size_t videos_per_group = 2;  // interventions filmed from several views
  LabelMode mode = LabelMode::kMulticlass;
  std::size_t activity_min = 10, activity_max = 30;  // multilabel track segments
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument listing every violated constraint.
void validate_synth_config(const SynthConfig& cfg);

SynthConfig synth_config_from_json(const std::string& json_text);
std::string synth_config_to_json(const SynthConfig& cfg);

struct SynthVideo {
  Video video;
  std::string group_id;
  std::vector<std::uint16_t> cluster_ids;  // emitting cluster per frame
  std::vector<std::uint8_t> occluded;      // 1 where the camera was blocked
  std::vector<std::uint8_t> shared;        // 1 where the cluster is shared
};

struct SynthDataset {
  SynthConfig cfg;
  Matrix centroids;  // (num_phases + 1) x D; last row is the occlusion cluster
  std::vector<SynthVideo> videos;
};

// Deterministic in (cfg, cfg.seed): every video uses an independent stream
// derived from (seed, video index), so generation order does not matter.
SynthDataset synth_generate(const SynthConfig& cfg);

// Exact ceiling on any frame-level classifier's accuracy: frames grouped by
// emitting cluster, bound = sum over clusters of the majority class count,
// divided by total frames. Only exact when clusters are identifiable, so it
// rejects noisy (sigma > 0) and multilabel datasets.
double framewise_bayes_bound(const SynthDataset& ds);

}  // namespace swr::data
