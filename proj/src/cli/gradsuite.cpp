#include "swr/cli/gradsuite.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "swr/core/params.hpp"
#include "swr/core/rng.hpp"
#include "swr/data/dataset.hpp"
#include "swr/models/model.hpp"
#include "swr/ops/ops.hpp"
#include "swr/train/loss.hpp"

namespace swr::cli {

namespace {

constexpr double kOpStep = 1e-5, kOpTol = 1e-6;
// Compositions chain hundreds of flops per output, so the finite-difference
// noise floor is higher; step and tolerance are relaxed accordingly.
constexpr double kModelStep = 1e-4, kModelTol = 1e-4;
// A coordinate whose analytic gradient nearly vanishes only measures
// floating-point noise in the difference quotient (measured ~1e-12 at these
// sizes), so draws with any nonzero gradient under 1e-7 are redrawn. Exact
// zeros (e.g. behind a relu channel that is dead at every frame) stay: both
// sides of the comparison are exactly zero there, and a backward bug that
// zeroes a live gradient still fails against the nonzero difference
// quotient.
constexpr double kGradFloor = 1e-7;

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (auto& x : m.data) x = rng.uniform(-2.0, 2.0);
  return m;
}

double dot(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data[i] * b.data[i];
  return s;
}

// dot(R, op(x)) probes every output coordinate with a fixed random weight.
template <typename Fwd, typename Bwd>
ops::GradCheckReport check_unary(std::uint64_t seed, Fwd fwd, Bwd bwd,
                                 bool off_zero) {
  Rng rng = Rng::derive(0x09u, seed);
  ParamStore ps;
  ps.add("x", random_matrix(rng, 4, 5));
  if (off_zero)
    for (auto& v : ps.at("x").value.data)
      if (std::fabs(v) < 5e-2) v = v < 0 ? v - 5e-2 : v + 5e-2;
  const Matrix r = random_matrix(rng, 4, 5);
  ps.at("x").grad = bwd(ps.at("x").value, r);
  return ops::finite_diff_check(
      ps, [&] { return dot(r, fwd(ps.at("x").value)); }, kOpStep, kOpTol);
}

GradUnit unit_linear() {
  return {"linear", "ops", kOpStep, kOpTol, [](std::uint64_t seed) {
            Rng rng = Rng::derive(0x01u, seed);
            ParamStore ps;
            ps.add("x", random_matrix(rng, 5, 3));
            ps.add("w", random_matrix(rng, 3, 4));
            ps.add("b", random_matrix(rng, 1, 4));
            const Matrix r = random_matrix(rng, 5, 4);
            auto g = ops::linear_backward(ps.at("x").value, ps.at("w").value, r);
            ps.at("x").grad = g.dx;
            ps.at("w").grad = g.dw;
            ps.at("b").grad = g.db;
            return ops::finite_diff_check(
                ps,
                [&] {
                  return dot(r, ops::linear(ps.at("x").value, ps.at("w").value,
                                            ps.at("b").value));
                },
                kOpStep, kOpTol);
          }};
}

GradUnit unit_conv1d() {
  return {"conv1d_causal", "ops", kOpStep, kOpTol, [](std::uint64_t seed) {
            const std::size_t k = 3, dil = std::size_t{1} << (seed % 3);
            Rng rng = Rng::derive(0x02u, seed);
            ParamStore ps;
            ps.add("x", random_matrix(rng, 9, 2));
            ps.add("kernel", random_matrix(rng, k * 2, 3));
            const Matrix r = random_matrix(rng, 9, 3);
            auto g = ops::conv1d_causal_backward(
                ps.at("x").value, ps.at("kernel").value, k, dil, r);
            ps.at("x").grad = g.dx;
            ps.at("kernel").grad = g.dkernel;
            return ops::finite_diff_check(
                ps,
                [&] {
                  return dot(r, ops::conv1d_causal(ps.at("x").value,
                                                   ps.at("kernel").value, k,
                                                   dil));
                },
                kOpStep, kOpTol);
          }};
}

GradUnit unit_activation(const std::string& name, ops::Activation kind) {
  // relu is probed away from its kink so ±step stays on one side.
  const bool off_zero = kind == ops::Activation::kRelu;
  return {name, "ops", kOpStep, kOpTol, [=](std::uint64_t seed) {
            return check_unary(
                seed, [=](const Matrix& x) { return ops::activation(x, kind); },
                [=](const Matrix& x, const Matrix& dy) {
                  const Matrix y = ops::activation(x, kind);
                  switch (kind) {
                    case ops::Activation::kRelu:
                      return ops::relu_backward(x, dy);
                    case ops::Activation::kSigmoid:
                      return ops::sigmoid_backward(y, dy);
                    case ops::Activation::kTanh:
                      return ops::tanh_backward(y, dy);
                    case ops::Activation::kSoftmaxRows:
                      return ops::softmax_rows_backward(y, dy);
                  }
                  throw std::logic_error("unreachable");
                },
                off_zero);
          }};
}

GradUnit unit_cross_entropy() {
  return {"cross_entropy", "losses", kOpStep, kOpTol, [](std::uint64_t seed) {
            Rng rng = Rng::derive(0x03u, seed);
            const std::size_t t = 6, c = 4;
            ParamStore ps;
            ps.add("scores", random_matrix(rng, t, c));
            std::vector<std::uint16_t> labels(t);
            for (auto& y : labels) y = static_cast<std::uint16_t>(rng.below(c));
            ps.at("scores").grad =
                train::cross_entropy(ps.at("scores").value, labels).dscores;
            return ops::finite_diff_check(
                ps,
                [&] {
                  return train::cross_entropy(ps.at("scores").value, labels)
                      .loss;
                },
                kOpStep, kOpTol);
          }};
}

GradUnit unit_binary_cross_entropy() {
  return {"binary_cross_entropy", "losses", kOpStep, kOpTol,
          [](std::uint64_t seed) {
            Rng rng = Rng::derive(0x04u, seed);
            const std::size_t t = 6, c = 4;
            ParamStore ps;
            ps.add("scores", random_matrix(rng, t, c));
            std::vector<std::uint8_t> mask(t * c);
            for (auto& y : mask) y = static_cast<std::uint8_t>(rng.below(2));
            ps.at("scores").grad =
                train::binary_cross_entropy(ps.at("scores").value, mask)
                    .dscores;
            return ops::finite_diff_check(
                ps,
                [&] {
                  return train::binary_cross_entropy(ps.at("scores").value,
                                                     mask)
                      .loss;
                },
                kOpStep, kOpTol);
          }};
}

models::ModelSpec small_spec(models::ModelKind kind, models::LabelMode mode) {
  models::ModelSpec spec;
  spec.kind = kind;
  spec.feature_dim = 4;
  spec.num_classes = 3;
  spec.label_mode = mode;
  spec.frame_hidden = 6;
  spec.clip_window = 4;
  spec.hidden = 5;
  spec.gru_layers = 2;
  spec.stages = 2;
  spec.layers = 2;
  spec.filters = 5;
  spec.kernel = 3;
  models::validate_spec(spec);
  return spec;
}

// Smallest |pre-activation| feeding a relu; infinity for kink-free kinds.
double relu_margin(const models::ModelSpec& spec, const models::Trace& tr) {
  double margin = std::numeric_limits<double>::infinity();
  auto scan = [&](const Matrix& m) {
    for (double v : m.data) margin = std::min(margin, std::fabs(v));
  };
  if (spec.kind == models::ModelKind::kFrameMlp ||
      spec.kind == models::ModelKind::kClipConv)
    scan(tr.pre1);
  if (spec.kind == models::ModelKind::kMstcn)
    for (const auto& s : tr.stages)
      for (const auto& c : s.cpre) scan(c);
  return margin;
}

bool floor_limited(const ParamStore& params) {
  for (const auto& p : params.entries())
    for (double g : p.grad.data)
      if (g != 0.0 && std::fabs(g) < kGradFloor) return true;
  return false;
}

GradUnit unit_composition(models::ModelKind kind, models::LabelMode mode) {
  const std::string name =
      models::model_kind_name(kind) + "+" +
      (mode == models::LabelMode::kMulticlass ? "ce" : "bce");
  return {name, "models", kModelStep, kModelTol, [=](std::uint64_t seed) {
            const models::ModelSpec spec = small_spec(kind, mode);
            const std::size_t t = 7;
            // Central differences are meaningless across a relu kink, so
            // draws are rejected until every pre-activation clears 8*step;
            // a ±step perturbation of a single parameter moves one by at
            // most ~2*step at these widths.
            for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
              const std::uint64_t draw = seed + (attempt << 32);
              Rng rng = Rng::derive(0x05u, draw);
              const Matrix x = random_matrix(rng, t, spec.feature_dim);
              data::LabelTrack labels;
              labels.mode = mode;
              labels.num_classes = spec.num_classes;
              if (mode == models::LabelMode::kMulticlass) {
                labels.classes.resize(t);
                for (auto& y : labels.classes)
                  y = static_cast<std::uint16_t>(rng.below(spec.num_classes));
              } else {
                labels.mask.resize(t * spec.num_classes);
                for (auto& y : labels.mask)
                  y = static_cast<std::uint8_t>(rng.below(2));
              }
              ParamStore params = models::init_params(spec, draw);
              models::Trace trace;
              const auto scores =
                  models::model_forward(spec, params, x, trace);
              if (relu_margin(spec, trace) <= 8 * kModelStep) continue;
              const auto sl = train::sequence_loss(scores, labels);
              models::model_backward(spec, params, trace, sl.dscores);
              if (floor_limited(params)) continue;
              return ops::finite_diff_check(
                  params,
                  [&] {
                    models::Trace tr;
                    return train::sequence_loss(
                               models::model_forward(spec, params, x, tr),
                               labels)
                        .loss;
                  },
                  kModelStep, kModelTol);
            }
            throw std::runtime_error(name + ": no well-conditioned draw found");
          }};
}

}  // namespace

std::vector<GradUnit> gradcheck_units(const std::string& scope) {
  std::vector<GradUnit> units;
  const bool all = scope == "all";
  if (all || scope == "ops") {
    units.push_back(unit_linear());
    units.push_back(unit_conv1d());
    units.push_back(unit_activation("relu", ops::Activation::kRelu));
    units.push_back(unit_activation("sigmoid", ops::Activation::kSigmoid));
    units.push_back(unit_activation("tanh", ops::Activation::kTanh));
    units.push_back(
        unit_activation("softmax_rows", ops::Activation::kSoftmaxRows));
  }
  if (all || scope == "losses") {
    units.push_back(unit_cross_entropy());
    units.push_back(unit_binary_cross_entropy());
  }
  if (all || scope == "models") {
    for (auto kind : {models::ModelKind::kFrameMlp, models::ModelKind::kClipConv,
                      models::ModelKind::kGru, models::ModelKind::kMstcn})
      for (auto mode :
           {models::LabelMode::kMulticlass, models::LabelMode::kMultilabel})
        units.push_back(unit_composition(kind, mode));
  }
  if (units.empty())
    throw std::invalid_argument("unknown gradcheck scope \"" + scope +
                                "\"; expected ops, losses, models or all");
  return units;
}

std::vector<GradUnitResult> run_gradcheck(const std::vector<GradUnit>& units,
                                          std::size_t seeds) {
  if (seeds == 0) throw std::invalid_argument("gradcheck: seeds must be >= 1");
  std::vector<GradUnitResult> results;
  for (const auto& u : units) {
    GradUnitResult res;
    res.name = u.name;
    res.tol = u.tol;
    res.pass = true;
    for (std::uint64_t s = 0; s < seeds; ++s) {
      const auto rep = u.run(s);
      if (rep.max_rel_err >= res.max_rel_err) {
        res.max_rel_err = rep.max_rel_err;
        res.worst_coord = rep.worst_coord;
      }
      res.pass = res.pass && rep.pass;
    }
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace swr::cli
