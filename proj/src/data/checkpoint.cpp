#include "swr/data/checkpoint.hpp"

#include <cstring>
#include <stdexcept>

#include "binio.hpp"

namespace swr::data {

namespace {

constexpr char kMagic[4] = {'S', 'W', 'R', 'C'};
constexpr std::uint32_t kVersion = 1;

void write_spec(BinWriter& w, const models::ModelSpec& s) {
  w.u8(static_cast<std::uint8_t>(s.kind));
  w.u8(s.label_mode == models::LabelMode::kMulticlass ? 0 : 1);
  for (std::size_t v : {s.feature_dim, s.num_classes, s.frame_hidden,
                        s.clip_window, s.hidden, s.gru_layers, s.stages,
                        s.layers, s.filters, s.kernel})
    w.u32(static_cast<std::uint32_t>(v));
}

models::ModelSpec read_spec(BinReader& r) {
  models::ModelSpec s;
  const std::size_t kind_off = r.offset();
  const std::uint8_t kind = r.u8();
  if (kind > 3) r.fail_at(kind_off, "invalid model kind byte");
  s.kind = static_cast<models::ModelKind>(kind);
  const std::size_t mode_off = r.offset();
  const std::uint8_t mode = r.u8();
  if (mode > 1) r.fail_at(mode_off, "invalid label mode byte");
  s.label_mode =
      mode == 0 ? models::LabelMode::kMulticlass : models::LabelMode::kMultilabel;
  s.feature_dim = r.u32();
  s.num_classes = r.u32();
  s.frame_hidden = r.u32();
  s.clip_window = r.u32();
  s.hidden = r.u32();
  s.gru_layers = r.u32();
  s.stages = r.u32();
  s.layers = r.u32();
  s.filters = r.u32();
  s.kernel = r.u32();
  return s;
}

void compare_specs(const models::ModelSpec& got, const models::ModelSpec& want) {
  auto fail = [](const std::string& field, const std::string& g,
                 const std::string& w) {
    throw std::runtime_error("checkpoint spec mismatch: " + field +
                             " is " + g + ", expected " + w);
  };
  if (got.kind != want.kind)
    fail("model kind", models::model_kind_name(got.kind),
         models::model_kind_name(want.kind));
  if (got.label_mode != want.label_mode)
    fail("label mode", models::label_mode_name(got.label_mode),
         models::label_mode_name(want.label_mode));
  auto num = [&](const char* field, std::size_t g, std::size_t w) {
    if (g != w) fail(field, std::to_string(g), std::to_string(w));
  };
  num("feature_dim", got.feature_dim, want.feature_dim);
  num("num_classes", got.num_classes, want.num_classes);
  switch (got.kind) {
    case models::ModelKind::kFrameMlp:
      num("frame_hidden", got.frame_hidden, want.frame_hidden);
      break;
    case models::ModelKind::kClipConv:
      num("clip_window", got.clip_window, want.clip_window);
      num("filters", got.filters, want.filters);
      break;
    case models::ModelKind::kGru:
      num("hidden", got.hidden, want.hidden);
      num("gru_layers", got.gru_layers, want.gru_layers);
      break;
    case models::ModelKind::kMstcn:
      num("stages", got.stages, want.stages);
      num("layers", got.layers, want.layers);
      num("filters", got.filters, want.filters);
      num("kernel", got.kernel, want.kernel);
      break;
  }
}

}  // namespace

void save_checkpoint(const models::ModelSpec& spec, const ParamStore& params,
                     const std::string& path) {
  BinWriter w(path);
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  write_spec(w, spec);
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params.entries()) {
    w.str(p.name);
    w.u32(static_cast<std::uint32_t>(p.value.rows));
    w.u32(static_cast<std::uint32_t>(p.value.cols));
    for (double v : p.value.data) w.f64(v);
  }
  w.close();
}

std::pair<models::ModelSpec, ParamStore> load_checkpoint(
    const std::string& path, const models::ModelSpec* expected) {
  BinReader r(path);
  char magic[4];
  r.bytes_into(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    r.fail_at(0, "bad magic (expected \"SWRC\")");
  const std::size_t ver_off = r.offset();
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    r.fail_at(ver_off, "unsupported version " + std::to_string(version));
  models::ModelSpec spec = read_spec(r);
  models::validate_spec(spec);
  if (expected) compare_specs(spec, *expected);

  // The stored tensors must exactly match what init_params would build.
  ParamStore reference = models::init_params(spec, 0);
  const std::uint32_t count = r.u32();
  if (count != reference.size())
    r.fail("parameter count " + std::to_string(count) + " does not match " +
           std::to_string(reference.size()) + " for this architecture");
  ParamStore out;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.str();
    const auto& ref = reference.entries()[i];
    if (name != ref.name)
      r.fail("tensor " + std::to_string(i) + " is \"" + name +
             "\", expected \"" + ref.name + "\"");
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    if (rows != ref.value.rows || cols != ref.value.cols)
      r.fail("tensor \"" + name + "\" has shape " + std::to_string(rows) +
             "x" + std::to_string(cols) + ", expected " +
             ref.value.shape_str());
    Matrix m(rows, cols);
    for (auto& v : m.data) v = r.f64();
    out.add(name, std::move(m));
  }
  r.expect_eof();
  return {spec, std::move(out)};
}

}  // namespace swr::data
