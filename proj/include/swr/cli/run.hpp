#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swr/data/manifest.hpp"
#include "swr/data/synth.hpp"
#include "swr/eval/metrics.hpp"
#include "swr/train/train.hpp"

namespace swr::cli {

// Fully-resolved experiment description. Everything a run depends on lives
// here, and the copy written into the run directory reproduces it exactly.
struct RunConfig {
  std::string manifest;
  std::string model = "mstcn";
  std::string out;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  train::TrainConfig train;  // train.seed is overwritten per run seed

  // Architecture overrides; feature_dim, num_classes and label mode always
  // come from the manifest.
  std::size_t frame_hidden = 64;
  std::size_t clip_window = 16;
  std::size_t hidden = 0;
  std::size_t gru_layers = 2;
  std::size_t stages = 2;
  std::size_t layers = 15;
  std::size_t filters = 64;
  std::size_t kernel = 3;
};

// Strict JSON codec: unknown keys are config errors, every known key is
// optional and falls back to the default above.
RunConfig run_config_from_json(const std::string& json_text);
std::string run_config_to_json(const RunConfig& cfg);

// Trains cfg.model once per seed (ascending, deduplicated), evaluates each
// checkpoint on the manifest's test split and aggregates across seeds.
// Artifacts under cfg.out:
//   config.json                       resolved copy of cfg
//   seed-<s>/checkpoint.swrc          trained parameters
//   seed-<s>/history.json             per-epoch learning rate and mean loss
//   seed-<s>/report.json              test-split metrics for that seed
//   aggregate.json                    mean/stddev across seeds
// An INCOMPLETE marker exists while the run is in flight and survives an
// abnormal exit. Reruns with an identical config rewrite identical bytes;
// with no_overwrite an existing config.json refuses the run instead.
eval::AggregateReport run_train_eval(const RunConfig& cfg, bool no_overwrite);

struct SynthRun {
  data::SynthDataset dataset;
  data::Manifest manifest;
  double pooled_bound = -1.0;     // -1 when the bound does not apply
  double train_bound_mean = -1.0; // per-video bound means by split
  double test_bound_mean = -1.0;
};

// Generates the dataset, assigns a leak-free group split at test_fraction
// (split order seeded from cfg.seed) and writes features/<id>.swrf,
// manifest.json, annotations.json and config.json under out_dir; noiseless
// multiclass configs additionally get bound.json with the exact framewise
// accuracy ceiling. Same overwrite/marker behavior as run_train_eval.
SynthRun run_synth(const data::SynthConfig& cfg, double test_fraction,
                   const std::string& out_dir, bool no_overwrite);

// Bundled generator configurations, usable wherever a config path is
// accepted. An unknown name raises std::invalid_argument listing the bundle.
std::vector<std::string> synth_preset_names();
std::string synth_preset(const std::string& name);

struct SynthRunConfig {
  data::SynthConfig generator;
  double test_fraction = 0.2;
};

// Accepts either a bare generator object or the wrapped form written into
// synth run directories: {"generator": {...}, "test_fraction": f}.
SynthRunConfig synth_run_config_from_json(const std::string& json_text);
std::string synth_run_config_to_json(const SynthRunConfig& cfg);

// Re-renders the architecture comparison table from aggregate.json files
// previously written by run_train_eval into the given run directories.
std::string render_runs_table(const std::vector<std::string>& run_dirs);

}  // namespace swr::cli
