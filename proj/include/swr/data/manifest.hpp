#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swr/data/dataset.hpp"

namespace swr::data {

enum class Split { kUnassigned, kTrain, kTest };

std::string split_name(Split s);
Split parse_split(const std::string& name);

struct ManifestEntry {
  std::string video_id;
  std::string group_id;
  std::string feature_path;  // as written in the file, resolved on load
  Split split = Split::kUnassigned;
  std::size_t t_frames = 0;  // from the feature header; not serialized
};

struct Manifest {
  std::string dataset;
  std::size_t num_classes = 0;
  LabelMode mode = LabelMode::kMulticlass;
  std::size_t feature_dim = 0;
  std::vector<ManifestEntry> entries;
};

// JSON manifest. Relative feature paths resolve against the manifest's
// directory. Load verifies every feature file exists and that its header
// matches the manifest's D, C and mode; all violations are reported together
// in one itemized std::runtime_error.
Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);

// Assigns whole groups to the test split, visiting groups in seeded random
// order: a group joins the test split only while that keeps the realized test
// frame fraction <= test_fraction; if the pass ends short of the target, the
// first skipped group is added to cross it. The realized fraction always lands
// in [test_fraction, test_fraction + largest_group_share). Requires
// 0 < test_fraction < 1 and at least two groups.
void group_split(Manifest& m, double test_fraction, std::uint64_t seed);

}  // namespace swr::data
