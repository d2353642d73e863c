#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swr/core/matrix.hpp"
#include "swr/core/params.hpp"

namespace swr::models {

enum class LabelMode { kMulticlass, kMultilabel };
enum class ModelKind { kFrameMlp, kClipConv, kGru, kMstcn };

// Architecture description. Kind-specific fields are ignored by the other
// kinds; zeros mean "use the default for this kind" where noted.
struct ModelSpec {
  ModelKind kind = ModelKind::kFrameMlp;
  std::size_t feature_dim = 0;  // D
  std::size_t num_classes = 0;  // C
  LabelMode label_mode = LabelMode::kMulticlass;

  std::size_t frame_hidden = 64;  // frame-mlp hidden width
  std::size_t clip_window = 16;   // clip-conv window n
  std::size_t hidden = 0;         // gru hidden H; 0 = feature_dim
  std::size_t gru_layers = 2;
  std::size_t stages = 2;   // mstcn S
  std::size_t layers = 15;  // mstcn dilated layers per stage L
  std::size_t filters = 64; // conv filter count F (mstcn and clip-conv)
  std::size_t kernel = 3;   // mstcn dilated kernel width k
};

ModelKind parse_model_kind(const std::string& name);  // lists valid kinds on error
std::string model_kind_name(ModelKind kind);
std::string label_mode_name(LabelMode mode);
LabelMode parse_label_mode(const std::string& name);

// Throws std::invalid_argument on out-of-range fields; resolves hidden=0.
void validate_spec(ModelSpec& spec);

struct Prediction {
  Matrix scores;         // T x C, final-stage pre-activation
  Matrix probabilities;  // softmax rows (multiclass) or sigmoid (multilabel)
  std::vector<std::size_t> argmax_track;  // multiclass only; ties -> lowest id
};

// Weights uniform in [-sqrt(1/fan_in), +sqrt(1/fan_in)] from the counter-based
// generator, biases zero. Identical (spec, seed) gives a bit-identical store.
ParamStore init_params(const ModelSpec& spec, std::uint64_t seed);

// Saved forward state consumed by model_backward.
struct GruLayerTrace {
  Matrix x;       // layer input, T x Din
  Matrix z, r, htilde, h;  // gate / state sequences, T x H
  Matrix hprev;   // row t = h_{t-1} (row 0 = 0), T x H
  Matrix rh;      // r ⊙ h_{t-1}, T x H
};

struct StageTrace {
  Matrix input;              // stage input, T x Cin
  Matrix h0;                 // after 1x1 in-conv, T x F
  std::vector<Matrix> hin;   // input to residual layer l, T x F
  std::vector<Matrix> cpre;  // dilated conv + bias, pre-relu
  std::vector<Matrix> act;   // relu(cpre)
  Matrix hout;               // after last residual layer
  Matrix scores;             // T x C
  Matrix probs;              // row probabilities, feeds the next stage
};

struct Trace {
  Matrix input;
  Matrix pre1, act1;  // frame-mlp / clip-conv hidden state
  std::vector<GruLayerTrace> gru;
  std::vector<StageTrace> stages;
  std::vector<Matrix> stage_scores;  // size 1 for all kinds except mstcn (S)
};

// Per-frame class scores for every stage (exactly spec.stages matrices for
// mstcn, one otherwise), each T x C. scores[t] for causal kinds depends only
// on input rows <= t; frame-mlp depends on row t alone, clip-conv on rows
// t-n+1..t. Fills `trace` for the matching backward call.
std::vector<Matrix> model_forward(const ModelSpec& spec,
                                  const ParamStore& params, const Matrix& v,
                                  Trace& trace);

// Accumulates parameter gradients for d(loss)/d(stage scores); dscores must
// hold one T x C matrix per stage returned by model_forward.
void model_backward(const ModelSpec& spec, ParamStore& params,
                    const Trace& trace, const std::vector<Matrix>& dscores);

// Row probabilities for scores: softmax rows (multiclass) or element-wise
// sigmoid (multilabel), per spec.label_mode.
Matrix probabilities_for(const ModelSpec& spec, const Matrix& scores);

Prediction model_predict(const ModelSpec& spec, const ParamStore& params,
                         const Matrix& v);

// Rows that can influence scores[t]: scores[t] depends on input rows
// t-lookback..t. 0 for frame-mlp, n-1 for clip-conv, stage-chained dilated
// reach for mstcn, SIZE_MAX (whole history) for gru.
std::size_t causal_lookback(const ModelSpec& spec);

}  // namespace swr::models
