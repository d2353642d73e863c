#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swr/core/matrix.hpp"
#include "swr/models/model.hpp"

namespace swr::data {

using models::LabelMode;

// Per-frame ground truth. Multiclass keeps one class id per frame; multilabel
// keeps a T x C binary mask (row-major).
struct LabelTrack {
  LabelMode mode = LabelMode::kMulticlass;
  std::size_t num_classes = 0;
  std::vector<std::uint16_t> classes;  // multiclass, length T
  std::vector<std::uint8_t> mask;      // multilabel, length T*C

  std::size_t length() const {
    return mode == LabelMode::kMulticlass
               ? classes.size()
               : (num_classes ? mask.size() / num_classes : 0);
  }
};

// Frame embeddings for one video, one row per second of footage.
struct FeatureSequence {
  std::string video_id;
  Matrix features;  // T x D
};

struct Video {
  FeatureSequence seq;
  LabelTrack labels;
};

// Binary feature/label container. Layout, little-endian throughout:
//   magic "SWRF" | u32 version=1 | u32 T | u32 D | u8 mode (0 multiclass,
//   1 multilabel) | u32 C | T*D float32 features row-major |
//   labels (multiclass: T u16; multilabel: T*C u8 in {0,1})
// Read/write failures and malformed content raise std::runtime_error naming
// the byte offset of the problem.
void write_features(const FeatureSequence& seq, const LabelTrack& labels,
                    const std::string& path);
Video read_features(const std::string& path);

struct SwrfHeader {
  std::uint32_t t = 0;
  std::uint32_t d = 0;
  LabelMode mode = LabelMode::kMulticlass;
  std::uint32_t c = 0;
};
// Reads and validates only the fixed 21-byte header.
SwrfHeader read_features_header(const std::string& path);

}  // namespace swr::data
