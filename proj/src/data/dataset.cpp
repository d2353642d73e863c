#include "swr/data/dataset.hpp"

#include <stdexcept>

#include "binio.hpp"

namespace swr::data {

namespace {

constexpr char kMagic[4] = {'S', 'W', 'R', 'F'};
constexpr std::uint32_t kVersion = 1;

void check_consistent(const FeatureSequence& seq, const LabelTrack& labels) {
  const std::size_t t = seq.features.rows;
  if (t < 1) throw std::invalid_argument("write_features: empty sequence");
  if (!seq.features.all_finite())
    throw std::invalid_argument("write_features: non-finite feature value in " +
                                seq.video_id);
  if (labels.num_classes < 1)
    throw std::invalid_argument("write_features: label track has no classes");
  if (labels.length() != t)
    throw std::invalid_argument(
        "write_features: label length " + std::to_string(labels.length()) +
        " does not match T=" + std::to_string(t));
  if (labels.mode == LabelMode::kMulticlass) {
    for (std::size_t i = 0; i < labels.classes.size(); ++i)
      if (labels.classes[i] >= labels.num_classes)
        throw std::invalid_argument(
            "write_features: class id " + std::to_string(labels.classes[i]) +
            " out of range at frame " + std::to_string(i));
  } else {
    if (labels.mask.size() != t * labels.num_classes)
      throw std::invalid_argument("write_features: mask size mismatch");
    for (std::uint8_t b : labels.mask)
      if (b > 1)
        throw std::invalid_argument("write_features: mask entries must be 0/1");
  }
}

}  // namespace

void write_features(const FeatureSequence& seq, const LabelTrack& labels,
                    const std::string& path) {
  check_consistent(seq, labels);
  BinWriter w(path);
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(seq.features.rows));
  w.u32(static_cast<std::uint32_t>(seq.features.cols));
  w.u8(labels.mode == LabelMode::kMulticlass ? 0 : 1);
  w.u32(static_cast<std::uint32_t>(labels.num_classes));
  for (double v : seq.features.data) w.f32(static_cast<float>(v));
  if (labels.mode == LabelMode::kMulticlass) {
    for (std::uint16_t c : labels.classes) w.u16(c);
  } else {
    for (std::uint8_t b : labels.mask) w.u8(b);
  }
  w.close();
}

namespace {

SwrfHeader read_header(BinReader& r) {
  char magic[4];
  r.bytes_into(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    r.fail_at(0, "bad magic (expected \"SWRF\")");
  const std::size_t ver_off = r.offset();
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    r.fail_at(ver_off, "unsupported version " + std::to_string(version));
  SwrfHeader h;
  const std::size_t t_off = r.offset();
  h.t = r.u32();
  h.d = r.u32();
  const std::size_t mode_off = r.offset();
  const std::uint8_t mode = r.u8();
  if (mode > 1)
    r.fail_at(mode_off, "invalid mode byte " + std::to_string(mode));
  h.mode = mode == 0 ? LabelMode::kMulticlass : LabelMode::kMultilabel;
  const std::size_t c_off = r.offset();
  h.c = r.u32();
  if (h.t < 1) r.fail_at(t_off, "frame count must be >= 1");
  if (h.d < 1) r.fail_at(t_off + 4, "feature dim must be >= 1");
  if (h.c < 1) r.fail_at(c_off, "class count must be >= 1");
  if (h.mode == LabelMode::kMulticlass && h.c > 65536)
    r.fail_at(c_off, "class count " + std::to_string(h.c) +
                         " not representable in u16 labels");
  return h;
}

}  // namespace

SwrfHeader read_features_header(const std::string& path) {
  BinReader r(path);
  return read_header(r);
}

Video read_features(const std::string& path) {
  BinReader r(path);
  const SwrfHeader h = read_header(r);
  Video v;
  r.require_available(static_cast<std::uint64_t>(h.t) * h.d, sizeof(float));
  v.seq.features = Matrix(h.t, h.d);
  for (auto& x : v.seq.features.data) x = static_cast<double>(r.f32());
  v.labels.mode = h.mode;
  v.labels.num_classes = h.c;
  if (h.mode == LabelMode::kMulticlass) {
    r.require_available(h.t, 2);
    v.labels.classes.resize(h.t);
    for (std::uint32_t t = 0; t < h.t; ++t) {
      const std::size_t off = r.offset();
      const std::uint16_t c = r.u16();
      if (c >= h.c)
        r.fail_at(off, "class id " + std::to_string(c) + " out of range [0," +
                           std::to_string(h.c) + ") at frame " +
                           std::to_string(t));
      v.labels.classes[t] = c;
    }
  } else {
    r.require_available(static_cast<std::uint64_t>(h.t) * h.c);
    v.labels.mask.resize(static_cast<std::size_t>(h.t) * h.c);
    for (std::size_t i = 0; i < v.labels.mask.size(); ++i) {
      const std::size_t off = r.offset();
      const std::uint8_t b = r.u8();
      if (b > 1)
        r.fail_at(off, "mask byte must be 0 or 1, got " + std::to_string(b));
      v.labels.mask[i] = b;
    }
  }
  r.expect_eof();
  return v;
}

}  // namespace swr::data
