#include "swr/models/model.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "swr/core/rng.hpp"
#include "swr/kernels/kernels.hpp"
#include "swr/ops/ops.hpp"

namespace swr::models {

namespace ops = swr::ops;
namespace k = swr::kernels;

ModelKind parse_model_kind(const std::string& name) {
  if (name == "frame-mlp") return ModelKind::kFrameMlp;
  if (name == "clip-conv") return ModelKind::kClipConv;
  if (name == "gru") return ModelKind::kGru;
  if (name == "mstcn") return ModelKind::kMstcn;
  throw std::invalid_argument("unknown model kind \"" + name +
                              "\"; valid kinds: frame-mlp, clip-conv, gru, mstcn");
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kFrameMlp: return "frame-mlp";
    case ModelKind::kClipConv: return "clip-conv";
    case ModelKind::kGru: return "gru";
    case ModelKind::kMstcn: return "mstcn";
  }
  throw std::invalid_argument("unknown model kind");
}

std::string label_mode_name(LabelMode mode) {
  return mode == LabelMode::kMulticlass ? "multiclass" : "multilabel";
}

LabelMode parse_label_mode(const std::string& name) {
  if (name == "multiclass") return LabelMode::kMulticlass;
  if (name == "multilabel") return LabelMode::kMultilabel;
  throw std::invalid_argument("unknown label mode \"" + name +
                              "\"; valid modes: multiclass, multilabel");
}

void validate_spec(ModelSpec& spec) {
  if (spec.feature_dim < 1)
    throw std::invalid_argument("model spec: feature_dim must be >= 1");
  if (spec.num_classes < 2)
    throw std::invalid_argument("model spec: num_classes must be >= 2");
  if (spec.hidden == 0) spec.hidden = spec.feature_dim;
  switch (spec.kind) {
    case ModelKind::kFrameMlp:
      if (spec.frame_hidden < 1)
        throw std::invalid_argument("model spec: frame hidden width must be >= 1");
      break;
    case ModelKind::kClipConv:
      if (spec.clip_window < 1)
        throw std::invalid_argument("model spec: clip window must be >= 1");
      if (spec.filters < 1)
        throw std::invalid_argument("model spec: filters must be >= 1");
      break;
    case ModelKind::kGru:
      if (spec.gru_layers < 1)
        throw std::invalid_argument("model spec: gru layers must be >= 1");
      break;
    case ModelKind::kMstcn:
      if (spec.stages < 1 || spec.layers < 1 || spec.filters < 1 ||
          spec.kernel < 1)
        throw std::invalid_argument(
            "model spec: mstcn stages, layers, filters and kernel must be >= 1");
      break;
  }
}

namespace {

void add_weight(ParamStore& ps, Rng& rng, const std::string& name,
                std::size_t rows, std::size_t cols, std::size_t fan_in) {
  Matrix w(rows, cols);
  const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
  for (auto& v : w.data) v = (2.0 * rng.uniform() - 1.0) * bound;
  ps.add(name, std::move(w));
}

void add_bias(ParamStore& ps, const std::string& name, std::size_t cols) {
  ps.add(name, Matrix(1, cols));
}

std::string stage_prefix(std::size_t s) { return "s" + std::to_string(s); }
std::string layer_prefix(std::size_t s, std::size_t l) {
  return "s" + std::to_string(s) + ".l" + std::to_string(l);
}
std::string gru_prefix(std::size_t l) { return "gru" + std::to_string(l); }

}  // namespace

ParamStore init_params(const ModelSpec& spec, std::uint64_t seed) {
  ModelSpec s = spec;
  validate_spec(s);
  ParamStore ps;
  Rng rng(seed, 0);
  const std::size_t d = s.feature_dim, c = s.num_classes;
  switch (s.kind) {
    case ModelKind::kFrameMlp: {
      add_weight(ps, rng, "l1.w", d, s.frame_hidden, d);
      add_bias(ps, "l1.b", s.frame_hidden);
      add_weight(ps, rng, "l2.w", s.frame_hidden, c, s.frame_hidden);
      add_bias(ps, "l2.b", c);
      break;
    }
    case ModelKind::kClipConv: {
      const std::size_t n = s.clip_window, f = s.filters;
      add_weight(ps, rng, "conv.k", n * d, f, n * d);
      add_bias(ps, "conv.b", f);
      add_weight(ps, rng, "head.w", f, c, f);
      add_bias(ps, "head.b", c);
      break;
    }
    case ModelKind::kGru: {
      const std::size_t h = s.hidden;
      for (std::size_t l = 0; l < s.gru_layers; ++l) {
        const std::size_t din = l == 0 ? d : h;
        const std::string p = gru_prefix(l);
        for (const char* gate : {"z", "r", "h"}) {
          add_weight(ps, rng, p + ".w" + gate, din, h, din);
          add_weight(ps, rng, p + ".u" + gate, h, h, h);
          add_bias(ps, p + ".b" + gate, h);
        }
      }
      add_weight(ps, rng, "head.w", h, c, h);
      add_bias(ps, "head.b", c);
      break;
    }
    case ModelKind::kMstcn: {
      const std::size_t f = s.filters, kw = s.kernel;
      for (std::size_t st = 0; st < s.stages; ++st) {
        const std::size_t cin = st == 0 ? d : c;
        const std::string sp = stage_prefix(st);
        add_weight(ps, rng, sp + ".in.w", cin, f, cin);
        add_bias(ps, sp + ".in.b", f);
        for (std::size_t l = 0; l < s.layers; ++l) {
          const std::string lp = layer_prefix(st, l);
          add_weight(ps, rng, lp + ".dconv.k", kw * f, f, kw * f);
          add_bias(ps, lp + ".dconv.b", f);
          add_weight(ps, rng, lp + ".pw.w", f, f, f);
          add_bias(ps, lp + ".pw.b", f);
        }
        add_weight(ps, rng, sp + ".out.w", f, c, f);
        add_bias(ps, sp + ".out.b", c);
      }
      break;
    }
  }
  return ps;
}

Matrix probabilities_for(const ModelSpec& spec, const Matrix& scores) {
  return spec.label_mode == LabelMode::kMulticlass
             ? ops::softmax_rows(scores)
             : ops::sigmoid(scores);
}

namespace {

void check_input(const ModelSpec& spec, const Matrix& v) {
  if (v.rows < 1)
    throw std::invalid_argument("model forward: empty feature sequence");
  if (v.cols != spec.feature_dim)
    throw std::invalid_argument(
        "model forward: feature dim mismatch, got " + std::to_string(v.cols) +
        " columns, spec expects " + std::to_string(spec.feature_dim));
}

// ---- frame-mlp ----

std::vector<Matrix> frame_mlp_fwd(const ParamStore& ps, const Matrix& v,
                                  Trace& tr) {
  tr.pre1 = ops::linear(v, ps.at("l1.w").value, ps.at("l1.b").value);
  tr.act1 = ops::relu(tr.pre1);
  return {ops::linear(tr.act1, ps.at("l2.w").value, ps.at("l2.b").value)};
}

void frame_mlp_bwd(ParamStore& ps, const Trace& tr, const Matrix& dscores) {
  auto g2 = ops::linear_backward(tr.act1, ps.at("l2.w").value, dscores);
  k::add(ps.at("l2.w").grad.data.data(), g2.dw.data.data(),
         ps.at("l2.w").grad.data.data(), g2.dw.size());
  k::add(ps.at("l2.b").grad.data.data(), g2.db.data.data(),
         ps.at("l2.b").grad.data.data(), g2.db.size());
  Matrix dpre = ops::relu_backward(tr.pre1, g2.dx);
  auto g1 = ops::linear_backward(tr.input, ps.at("l1.w").value, dpre);
  k::add(ps.at("l1.w").grad.data.data(), g1.dw.data.data(),
         ps.at("l1.w").grad.data.data(), g1.dw.size());
  k::add(ps.at("l1.b").grad.data.data(), g1.db.data.data(),
         ps.at("l1.b").grad.data.data(), g1.db.size());
}

// ---- clip-conv ----

std::vector<Matrix> clip_conv_fwd(const ModelSpec& spec, const ParamStore& ps,
                                  const Matrix& v, Trace& tr) {
  Matrix c = ops::conv1d_causal(v, ps.at("conv.k").value, spec.clip_window, 1);
  k::add_bias_rows(c.data.data(), ps.at("conv.b").value.data.data(), c.rows,
                   c.cols);
  tr.pre1 = std::move(c);
  tr.act1 = ops::relu(tr.pre1);
  return {ops::linear(tr.act1, ps.at("head.w").value, ps.at("head.b").value)};
}

void clip_conv_bwd(const ModelSpec& spec, ParamStore& ps, const Trace& tr,
                   const Matrix& dscores) {
  auto gh = ops::linear_backward(tr.act1, ps.at("head.w").value, dscores);
  k::add(ps.at("head.w").grad.data.data(), gh.dw.data.data(),
         ps.at("head.w").grad.data.data(), gh.dw.size());
  k::add(ps.at("head.b").grad.data.data(), gh.db.data.data(),
         ps.at("head.b").grad.data.data(), gh.db.size());
  Matrix dpre = ops::relu_backward(tr.pre1, gh.dx);
  Matrix db(1, dpre.cols);
  k::col_sums(dpre.data.data(), db.data.data(), dpre.rows, dpre.cols);
  k::add(ps.at("conv.b").grad.data.data(), db.data.data(),
         ps.at("conv.b").grad.data.data(), db.size());
  auto gc = ops::conv1d_causal_backward(tr.input, ps.at("conv.k").value,
                                        spec.clip_window, 1, dpre);
  k::add(ps.at("conv.k").grad.data.data(), gc.dkernel.data.data(),
         ps.at("conv.k").grad.data.data(), gc.dkernel.size());
}

// ---- gru ----

// Row helpers: y[1xH] = x[1xH] * M[HxH] done with the dispatch kernels so the
// reduction order is the canonical one.
void row_matmul(const double* x, const Matrix& m, double* y) {
  k::matmul(x, m.data.data(), y, 1, m.rows, m.cols);
}

std::vector<Matrix> gru_fwd(const ModelSpec& spec, const ParamStore& ps,
                            const Matrix& v, Trace& tr) {
  const std::size_t t_len = v.rows, h = spec.hidden;
  tr.gru.clear();
  tr.gru.resize(spec.gru_layers);
  const Matrix* layer_in = &v;
  for (std::size_t l = 0; l < spec.gru_layers; ++l) {
    GruLayerTrace& lt = tr.gru[l];
    const std::string p = gru_prefix(l);
    lt.x = *layer_in;
    // Input-to-hidden parts for the whole sequence in one pass.
    const Matrix xz =
        ops::linear(lt.x, ps.at(p + ".wz").value, ps.at(p + ".bz").value);
    const Matrix xr =
        ops::linear(lt.x, ps.at(p + ".wr").value, ps.at(p + ".br").value);
    const Matrix xh =
        ops::linear(lt.x, ps.at(p + ".wh").value, ps.at(p + ".bh").value);
    const Matrix& uz = ps.at(p + ".uz").value;
    const Matrix& ur = ps.at(p + ".ur").value;
    const Matrix& uh = ps.at(p + ".uh").value;

    lt.z = Matrix(t_len, h);
    lt.r = Matrix(t_len, h);
    lt.htilde = Matrix(t_len, h);
    lt.h = Matrix(t_len, h);
    lt.hprev = Matrix(t_len, h);
    lt.rh = Matrix(t_len, h);
    std::vector<double> tmp(h);
    for (std::size_t t = 0; t < t_len; ++t) {
      const double* hprev =
          t == 0 ? lt.hprev.row(0) : lt.h.row(t - 1);  // row 0 stays zero
      if (t > 0)
        for (std::size_t j = 0; j < h; ++j) lt.hprev(t, j) = hprev[j];
      row_matmul(hprev, uz, tmp.data());
      for (std::size_t j = 0; j < h; ++j)
        lt.z(t, j) = 1.0 / (1.0 + std::exp(-(xz(t, j) + tmp[j])));
      row_matmul(hprev, ur, tmp.data());
      for (std::size_t j = 0; j < h; ++j)
        lt.r(t, j) = 1.0 / (1.0 + std::exp(-(xr(t, j) + tmp[j])));
      for (std::size_t j = 0; j < h; ++j) lt.rh(t, j) = lt.r(t, j) * hprev[j];
      row_matmul(lt.rh.row(t), uh, tmp.data());
      for (std::size_t j = 0; j < h; ++j)
        lt.htilde(t, j) = std::tanh(xh(t, j) + tmp[j]);
      for (std::size_t j = 0; j < h; ++j)
        lt.h(t, j) = (1.0 - lt.z(t, j)) * hprev[j] +
                     lt.z(t, j) * lt.htilde(t, j);
    }
    layer_in = &lt.h;
  }
  return {ops::linear(tr.gru.back().h, ps.at("head.w").value,
                      ps.at("head.b").value)};
}

void gru_bwd(const ModelSpec& spec, ParamStore& ps, const Trace& tr,
             const Matrix& dscores) {
  const std::size_t h = spec.hidden;
  auto gh = ops::linear_backward(tr.gru.back().h, ps.at("head.w").value,
                                 dscores);
  k::add(ps.at("head.w").grad.data.data(), gh.dw.data.data(),
         ps.at("head.w").grad.data.data(), gh.dw.size());
  k::add(ps.at("head.b").grad.data.data(), gh.db.data.data(),
         ps.at("head.b").grad.data.data(), gh.db.size());

  Matrix dh_seq = std::move(gh.dx);  // dL/dh_t for the current layer, T x H
  for (std::size_t li = spec.gru_layers; li-- > 0;) {
    const GruLayerTrace& lt = tr.gru[li];
    const std::string p = gru_prefix(li);
    const std::size_t t_len = lt.h.rows;
    const Matrix uzT = ops::transpose(ps.at(p + ".uz").value);
    const Matrix urT = ops::transpose(ps.at(p + ".ur").value);
    const Matrix uhT = ops::transpose(ps.at(p + ".uh").value);

    Matrix daz(t_len, h), dar(t_len, h), dah(t_len, h);
    std::vector<double> carry(h, 0.0), dh(h), drh(h), tmp(h);
    for (std::size_t t = t_len; t-- > 0;) {
      const double* hprev = lt.hprev.row(t);
      for (std::size_t j = 0; j < h; ++j) dh[j] = dh_seq(t, j) + carry[j];
      // h_t = (1-z)*hprev + z*htilde
      for (std::size_t j = 0; j < h; ++j) {
        const double z = lt.z(t, j), ht = lt.htilde(t, j);
        const double dz = dh[j] * (ht - hprev[j]);
        daz(t, j) = dz * z * (1.0 - z);
        dah(t, j) = dh[j] * z * (1.0 - ht * ht);
        carry[j] = dh[j] * (1.0 - z);  // direct path into h_{t-1}
      }
      // candidate pre-activation flows through U_h into r ⊙ h_{t-1}
      row_matmul(dah.row(t), uhT, drh.data());
      for (std::size_t j = 0; j < h; ++j) {
        const double r = lt.r(t, j);
        dar(t, j) = drh[j] * hprev[j] * r * (1.0 - r);
        carry[j] += drh[j] * r;
      }
      row_matmul(daz.row(t), uzT, tmp.data());
      for (std::size_t j = 0; j < h; ++j) carry[j] += tmp[j];
      row_matmul(dar.row(t), urT, tmp.data());
      for (std::size_t j = 0; j < h; ++j) carry[j] += tmp[j];
    }

    for (const auto& [gate, da] :
         {std::pair<const char*, const Matrix*>{"z", &daz},
          {"r", &dar},
          {"h", &dah}}) {
      const Matrix* in = gate[0] == 'h' ? &lt.rh : &lt.hprev;
      Matrix dw = ops::matmul_at_b(lt.x, *da);
      Matrix du = ops::matmul_at_b(*in, *da);
      Matrix db(1, h);
      k::col_sums(da->data.data(), db.data.data(), t_len, h);
      const std::string g(1, gate[0]);
      k::add(ps.at(p + ".w" + g).grad.data.data(), dw.data.data(),
             ps.at(p + ".w" + g).grad.data.data(), dw.size());
      k::add(ps.at(p + ".u" + g).grad.data.data(), du.data.data(),
             ps.at(p + ".u" + g).grad.data.data(), du.size());
      k::add(ps.at(p + ".b" + g).grad.data.data(), db.data.data(),
             ps.at(p + ".b" + g).grad.data.data(), db.size());
    }
    // gradient into this layer's input sequence
    Matrix dx = ops::matmul_a_bt(daz, ps.at(p + ".wz").value);
    Matrix dxr = ops::matmul_a_bt(dar, ps.at(p + ".wr").value);
    Matrix dxh = ops::matmul_a_bt(dah, ps.at(p + ".wh").value);
    k::add(dx.data.data(), dxr.data.data(), dx.data.data(), dx.size());
    k::add(dx.data.data(), dxh.data.data(), dx.data.data(), dx.size());
    dh_seq = std::move(dx);
  }
}

// ---- mstcn ----

std::vector<Matrix> mstcn_fwd(const ModelSpec& spec, const ParamStore& ps,
                              const Matrix& v, Trace& tr) {
  tr.stages.clear();
  tr.stages.resize(spec.stages);
  std::vector<Matrix> all_scores;
  const Matrix* stage_in = &v;
  for (std::size_t st = 0; st < spec.stages; ++st) {
    StageTrace& s = tr.stages[st];
    const std::string sp = stage_prefix(st);
    s.input = *stage_in;
    s.h0 = ops::linear(s.input, ps.at(sp + ".in.w").value,
                       ps.at(sp + ".in.b").value);
    s.hin.resize(spec.layers);
    s.cpre.resize(spec.layers);
    s.act.resize(spec.layers);
    Matrix h = s.h0;
    std::size_t dilation = 1;
    for (std::size_t l = 0; l < spec.layers; ++l) {
      const std::string lp = layer_prefix(st, l);
      s.hin[l] = h;
      Matrix c = ops::conv1d_causal(h, ps.at(lp + ".dconv.k").value,
                                    spec.kernel, dilation);
      k::add_bias_rows(c.data.data(), ps.at(lp + ".dconv.b").value.data.data(),
                       c.rows, c.cols);
      s.cpre[l] = std::move(c);
      s.act[l] = ops::relu(s.cpre[l]);
      Matrix pw = ops::linear(s.act[l], ps.at(lp + ".pw.w").value,
                              ps.at(lp + ".pw.b").value);
      k::add(h.data.data(), pw.data.data(), h.data.data(), h.size());
      dilation *= 2;
    }
    s.hout = h;
    s.scores = ops::linear(s.hout, ps.at(sp + ".out.w").value,
                           ps.at(sp + ".out.b").value);
    all_scores.push_back(s.scores);
    if (st + 1 < spec.stages) {
      s.probs = probabilities_for(spec, s.scores);
      stage_in = &s.probs;
    }
  }
  return all_scores;
}

void mstcn_bwd(const ModelSpec& spec, ParamStore& ps, const Trace& tr,
               const std::vector<Matrix>& dscores) {
  Matrix dnext_input;  // dL/d(stage input) flowing back from the stage above
  for (std::size_t st = spec.stages; st-- > 0;) {
    const StageTrace& s = tr.stages[st];
    const std::string sp = stage_prefix(st);
    Matrix dsc = dscores[st];
    if (st + 1 < spec.stages) {
      // The next stage consumed probabilities_for(scores).
      Matrix through =
          spec.label_mode == LabelMode::kMulticlass
              ? ops::softmax_rows_backward(s.probs, dnext_input)
              : ops::sigmoid_backward(s.probs, dnext_input);
      k::add(dsc.data.data(), through.data.data(), dsc.data.data(),
             dsc.size());
    }
    auto go = ops::linear_backward(s.hout, ps.at(sp + ".out.w").value, dsc);
    k::add(ps.at(sp + ".out.w").grad.data.data(), go.dw.data.data(),
           ps.at(sp + ".out.w").grad.data.data(), go.dw.size());
    k::add(ps.at(sp + ".out.b").grad.data.data(), go.db.data.data(),
           ps.at(sp + ".out.b").grad.data.data(), go.db.size());

    Matrix dhidden = std::move(go.dx);
    std::size_t dilation = std::size_t{1} << (spec.layers - 1);
    for (std::size_t l = spec.layers; l-- > 0;) {
      const std::string lp = layer_prefix(st, l);
      auto gpw =
          ops::linear_backward(s.act[l], ps.at(lp + ".pw.w").value, dhidden);
      k::add(ps.at(lp + ".pw.w").grad.data.data(), gpw.dw.data.data(),
             ps.at(lp + ".pw.w").grad.data.data(), gpw.dw.size());
      k::add(ps.at(lp + ".pw.b").grad.data.data(), gpw.db.data.data(),
             ps.at(lp + ".pw.b").grad.data.data(), gpw.db.size());
      Matrix dc = ops::relu_backward(s.cpre[l], gpw.dx);
      Matrix db(1, dc.cols);
      k::col_sums(dc.data.data(), db.data.data(), dc.rows, dc.cols);
      k::add(ps.at(lp + ".dconv.b").grad.data.data(), db.data.data(),
             ps.at(lp + ".dconv.b").grad.data.data(), db.size());
      auto gc = ops::conv1d_causal_backward(
          s.hin[l], ps.at(lp + ".dconv.k").value, spec.kernel, dilation, dc);
      k::add(ps.at(lp + ".dconv.k").grad.data.data(), gc.dkernel.data.data(),
             ps.at(lp + ".dconv.k").grad.data.data(), gc.dkernel.size());
      // residual: dh_l = dh_{l+1} + conv-path gradient
      k::add(dhidden.data.data(), gc.dx.data.data(), dhidden.data.data(),
             dhidden.size());
      dilation /= 2;
    }
    auto gi = ops::linear_backward(s.input, ps.at(sp + ".in.w").value,
                                   dhidden);
    k::add(ps.at(sp + ".in.w").grad.data.data(), gi.dw.data.data(),
           ps.at(sp + ".in.w").grad.data.data(), gi.dw.size());
    k::add(ps.at(sp + ".in.b").grad.data.data(), gi.db.data.data(),
           ps.at(sp + ".in.b").grad.data.data(), gi.db.size());
    dnext_input = std::move(gi.dx);
  }
}

}  // namespace

std::vector<Matrix> model_forward(const ModelSpec& spec,
                                  const ParamStore& params, const Matrix& v,
                                  Trace& trace) {
  check_input(spec, v);
  trace = Trace{};
  trace.input = v;
  switch (spec.kind) {
    case ModelKind::kFrameMlp:
      trace.stage_scores = frame_mlp_fwd(params, v, trace);
      break;
    case ModelKind::kClipConv:
      trace.stage_scores = clip_conv_fwd(spec, params, v, trace);
      break;
    case ModelKind::kGru:
      trace.stage_scores = gru_fwd(spec, params, v, trace);
      break;
    case ModelKind::kMstcn:
      trace.stage_scores = mstcn_fwd(spec, params, v, trace);
      break;
  }
  return trace.stage_scores;
}

void model_backward(const ModelSpec& spec, ParamStore& params,
                    const Trace& trace, const std::vector<Matrix>& dscores) {
  if (dscores.size() != trace.stage_scores.size())
    throw std::invalid_argument(
        "model backward: expected " +
        std::to_string(trace.stage_scores.size()) + " stage gradients, got " +
        std::to_string(dscores.size()));
  for (std::size_t i = 0; i < dscores.size(); ++i)
    require_shape(dscores[i].same_shape(trace.stage_scores[i]),
                  "model backward", dscores[i], trace.stage_scores[i]);
  switch (spec.kind) {
    case ModelKind::kFrameMlp:
      frame_mlp_bwd(params, trace, dscores[0]);
      break;
    case ModelKind::kClipConv:
      clip_conv_bwd(spec, params, trace, dscores[0]);
      break;
    case ModelKind::kGru:
      gru_bwd(spec, params, trace, dscores[0]);
      break;
    case ModelKind::kMstcn:
      mstcn_bwd(spec, params, trace, dscores);
      break;
  }
}

Prediction model_predict(const ModelSpec& spec, const ParamStore& params,
                         const Matrix& v) {
  Trace tr;
  auto scores = model_forward(spec, params, v, tr);
  Prediction pred;
  pred.scores = scores.back();
  pred.probabilities = probabilities_for(spec, pred.scores);
  if (spec.label_mode == LabelMode::kMulticlass) {
    pred.argmax_track.resize(pred.scores.rows);
    for (std::size_t t = 0; t < pred.scores.rows; ++t) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < pred.scores.cols; ++c)
        if (pred.scores(t, c) > pred.scores(t, best)) best = c;
      pred.argmax_track[t] = best;
    }
  }
  return pred;
}

std::size_t causal_lookback(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::kFrameMlp: return 0;
    case ModelKind::kClipConv: return spec.clip_window - 1;
    case ModelKind::kGru: return SIZE_MAX;
    case ModelKind::kMstcn: {
      // per stage: (k-1) * sum of dilations 1,2,...,2^(L-1)
      const std::size_t per_stage =
          (spec.kernel - 1) * ((std::size_t{1} << spec.layers) - 1);
      return spec.stages * per_stage;
    }
  }
  return 0;
}

}  // namespace swr::models
