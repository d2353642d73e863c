#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>

#include "swr/core/rng.hpp"
#include "swr/eval/metrics.hpp"

using namespace swr;
using namespace swr::eval;

namespace {

// Rank-walk oracle: at every rank k rebuild the top-k set from scratch and
// accumulate (R_k - R_{k-1}) * P_k on ranks holding positives.
double ap_oracle(const std::vector<double>& scores,
                 const std::vector<std::uint8_t>& labels) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  double total_pos = 0;
  for (auto y : labels) total_pos += y;
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    std::size_t tp = 0;
    for (std::size_t i = 0; i < k; ++i) tp += labels[order[i]];
    const double precision = static_cast<double>(tp) / static_cast<double>(k);
    const double recall = static_cast<double>(tp) / total_pos;
    if (labels[order[k - 1]] == 1) ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

// Independent confusion-count recomputation of the f1 chain.
double f1_oracle(const std::vector<std::size_t>& pred,
                 const std::vector<std::uint16_t>& labels, std::size_t c) {
  std::vector<double> tp(c, 0), fp(c, 0), fn(c, 0);
  for (std::size_t t = 0; t < pred.size(); ++t) {
    for (std::size_t k = 0; k < c; ++k) {
      const bool hat = pred[t] == k, truth = labels[t] == k;
      if (hat && truth) tp[k] += 1;
      if (hat && !truth) fp[k] += 1;
      if (!hat && truth) fn[k] += 1;
    }
  }
  double psum = 0, rsum = 0, pn = 0, rn = 0;
  for (std::size_t k = 0; k < c; ++k) {
    if (tp[k] + fp[k] > 0) {
      psum += tp[k] / (tp[k] + fp[k]);
      pn += 1;
    }
    if (tp[k] + fn[k] > 0) {
      rsum += tp[k] / (tp[k] + fn[k]);
      rn += 1;
    }
  }
  const double p = pn ? psum / pn : 0, r = rn ? rsum / rn : 0;
  return p + r > 0 ? 2 * p * r / (p + r) : 0;
}

data::Video make_video(const std::string& id,
                       const std::vector<std::uint16_t>& labels,
                       std::size_t c) {
  data::Video v;
  v.seq.video_id = id;
  v.seq.features = Matrix(labels.size(), 1);
  v.labels.mode = data::LabelMode::kMulticlass;
  v.labels.num_classes = c;
  v.labels.classes = labels;
  return v;
}

models::Prediction make_pred(const std::vector<std::size_t>& track,
                             std::size_t c) {
  models::Prediction p;
  p.argmax_track = track;
  p.scores = Matrix(track.size(), c);
  p.probabilities = Matrix(track.size(), c);
  return p;
}

data::Manifest make_manifest(const std::vector<std::string>& ids,
                             std::size_t c, models::LabelMode mode) {
  data::Manifest m;
  m.dataset = "t";
  m.num_classes = c;
  m.mode = mode;
  m.feature_dim = 1;
  for (const auto& id : ids) {
    data::ManifestEntry e;
    e.video_id = id;
    e.group_id = id;
    e.split = data::Split::kTest;
    e.t_frames = 1;
    m.entries.push_back(e);
  }
  return m;
}

}  // namespace

TEST_CASE("video accuracy: worked examples") {
  CHECK(video_accuracy({0, 1, 2}, {0, 1, 2}) == 1.0);
  CHECK(video_accuracy({0, 1, 1, 2}, {0, 1, 2, 2}) == 0.75);
  CHECK(video_accuracy({1, 2, 0}, {0, 1, 2}) == 0.0);
  CHECK_THROWS_AS(video_accuracy({0, 1}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(video_accuracy({}, {}), std::invalid_argument);
}

TEST_CASE("per-class precision/recall: the worked 4-frame example") {
  const auto pr = per_class_pr({0, 1, 1, 1}, {0, 0, 1, 1}, 2);
  CHECK(pr.counts[0].tp == 1);
  CHECK(pr.counts[0].fp == 0);
  CHECK(pr.counts[0].fn == 1);
  CHECK(pr.counts[1].tp == 2);
  CHECK(pr.counts[1].fp == 1);
  CHECK(pr.counts[1].fn == 0);
  CHECK(pr.p_defined[0]);
  CHECK(pr.precision[0] == 1.0);
  CHECK(pr.recall[0] == 0.5);
  CHECK(pr.precision[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(pr.recall[1] == 1.0);

  const F1Summary f = f1_video(pr);
  CHECK(f.mean_precision == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(f.mean_recall == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(f.f1 == doctest::Approx(0.789474).epsilon(1e-6));
}

TEST_CASE("per-class precision/recall: defined-ness rules") {
  // class 2 never predicted but present -> R defined (0), P undefined;
  // class 3 absent everywhere -> both undefined
  const auto pr = per_class_pr({0, 0, 1}, {0, 2, 1}, 4);
  CHECK(!pr.p_defined[2]);
  CHECK(pr.r_defined[2]);
  CHECK(pr.recall[2] == 0.0);
  CHECK(!pr.p_defined[3]);
  CHECK(!pr.r_defined[3]);

  SUBCASE("perfect prediction gives P=R=1 on every defined class") {
    const auto p2 = per_class_pr({0, 1, 2}, {0, 1, 2}, 4);
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(p2.precision[c] == 1.0);
      CHECK(p2.recall[c] == 1.0);
    }
    CHECK(f1_video(p2).f1 == 1.0);
  }
  SUBCASE("P=1, R=0 collapses the harmonic mean to 0") {
    PerClassPR h;
    h.counts.resize(2);
    h.precision = {1.0, 0.0};
    h.recall = {0.0, 0.0};
    h.p_defined = {1, 0};
    h.r_defined = {0, 1};
    CHECK(f1_video(h).f1 == 0.0);
  }
  SUBCASE("zero defined classes is an error") {
    PerClassPR none;
    none.counts.resize(2);
    none.precision.assign(2, 0.0);
    none.recall.assign(2, 0.0);
    none.p_defined.assign(2, 0);
    none.r_defined.assign(2, 0);
    CHECK_THROWS_AS(f1_video(none), std::invalid_argument);
  }
}

TEST_CASE("average precision: worked examples and tie handling") {
  CHECK(average_precision({0.9, 0.8, 0.7}, {1, 0, 1}) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(average_precision({0.4, 0.9, 0.8, 0.1}, {0, 1, 1, 0}) == 1.0);
  // all-equal scores: ties resolve by ascending frame index
  CHECK(average_precision({0.5, 0.5, 0.5}, {1, 0, 0}) == 1.0);
  CHECK(average_precision({0.5, 0.5, 0.5}, {0, 0, 1}) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(average_precision({0.1, 0.2}, {0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(average_precision({0.1}, {2}), std::invalid_argument);
}

TEST_CASE("average precision matches the rank-walk oracle on 1000 instances") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; checked < 1000; ++seed) {
    Rng rng(9000 + seed, 0);
    const std::size_t t = 2 + rng.below(11);
    std::vector<double> scores(t);
    std::vector<std::uint8_t> labels(t);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < t; ++i) {
      // coarse grid makes score ties common
      scores[i] = static_cast<double>(rng.below(5)) / 4.0;
      labels[i] = static_cast<std::uint8_t>(rng.below(2));
      pos += labels[i];
    }
    if (pos == 0) continue;
    const double got = average_precision(scores, labels);
    const double want = ap_oracle(scores, labels);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("average precision: top-ranked extra positive never hurts") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(15000 + seed, 0);
    const std::size_t t = 3 + rng.below(9);
    std::vector<double> scores(t);
    std::vector<std::uint8_t> labels(t);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < t; ++i) {
      scores[i] = rng.uniform();
      labels[i] = static_cast<std::uint8_t>(rng.below(2));
      pos += labels[i];
    }
    if (pos == 0) labels[0] = 1;
    const double base = average_precision(scores, labels);
    double top = scores[0];
    for (double s : scores) top = std::max(top, s);
    std::vector<double> s2 = scores;
    std::vector<std::uint8_t> l2 = labels;
    s2.push_back(top + 1.0);
    l2.push_back(1);
    CHECK(average_precision(s2, l2) >= base - 1e-12);
  }
}

TEST_CASE("f1 chain matches the confusion-count oracle on 1000 instances") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(22000 + seed, 0);
    const std::size_t t = 1 + rng.below(12), c = 2 + rng.below(3);
    std::vector<std::size_t> pred(t);
    std::vector<std::uint16_t> labels(t);
    for (std::size_t i = 0; i < t; ++i) {
      pred[i] = rng.below(c);
      labels[i] = static_cast<std::uint16_t>(rng.below(c));
    }
    const auto pr = per_class_pr(pred, labels, c);
    const F1Summary f = f1_video(pr);
    CHECK(f.f1 == doctest::Approx(f1_oracle(pred, labels, c)).epsilon(1e-12));
    CHECK(f.f1 >= 0.0);
    CHECK(f.f1 <= 1.0);
    CHECK(f.mean_precision <= 1.0);
    CHECK(f.mean_recall <= 1.0);

    // consistent class relabeling changes nothing
    std::vector<std::size_t> perm(c);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<std::size_t> pred2(t);
    std::vector<std::uint16_t> labels2(t);
    for (std::size_t i = 0; i < t; ++i) {
      pred2[i] = perm[pred[i]];
      labels2[i] = static_cast<std::uint16_t>(perm[labels[i]]);
    }
    const F1Summary f2 = f1_video(per_class_pr(pred2, labels2, c));
    CHECK(f2.f1 == doctest::Approx(f.f1).epsilon(1e-12));
    CHECK(video_accuracy(pred2, labels2) ==
          doctest::Approx(video_accuracy(pred, labels)).epsilon(1e-12));
  }
}

TEST_CASE("evaluate: equal video weighting regardless of length") {
  const std::size_t c = 3;
  std::map<std::string, data::Video> vids;
  std::map<std::string, models::Prediction> preds;
  // long video, all correct (acc 1.0)
  vids.emplace("long", make_video("long", std::vector<std::uint16_t>(40, 1), c));
  preds.emplace("long", make_pred(std::vector<std::size_t>(40, 1), c));
  // short video, half correct (acc 0.5)
  vids.emplace("short", make_video("short", {0, 0, 1, 1}, c));
  preds.emplace("short", make_pred({0, 0, 0, 0}, c));

  const auto m = make_manifest({"long", "short"}, c,
                               models::LabelMode::kMulticlass);
  const SplitReport rep = evaluate(m, data::Split::kTest, vids, preds);
  REQUIRE(rep.videos.size() == 2);
  CHECK(rep.videos[0].accuracy == 1.0);
  CHECK(rep.videos[1].accuracy == 0.5);
  CHECK(rep.means[0].first == "accuracy");
  CHECK(rep.means[0].second == doctest::Approx(0.75).epsilon(1e-15));

  SUBCASE("single-video split mirrors that video") {
    auto m1 = make_manifest({"long"}, c, models::LabelMode::kMulticlass);
    const SplitReport r1 = evaluate(m1, data::Split::kTest, vids, preds);
    CHECK(r1.means[0].second == r1.videos[0].accuracy);
    CHECK(r1.means[3].second == r1.videos[0].f1);
  }
  SUBCASE("video order does not change the split means") {
    auto m2 = make_manifest({"short", "long"}, c,
                            models::LabelMode::kMulticlass);
    const SplitReport r2 = evaluate(m2, data::Split::kTest, vids, preds);
    for (std::size_t i = 0; i < rep.means.size(); ++i)
      CHECK(r2.means[i].second ==
            doctest::Approx(rep.means[i].second).epsilon(1e-15));
  }
  SUBCASE("missing prediction names the video") {
    preds.erase("short");
    CHECK_THROWS_WITH_AS(evaluate(m, data::Split::kTest, vids, preds),
                         doctest::Contains("short"), std::runtime_error);
  }
  SUBCASE("length mismatch names the video") {
    preds["short"] = make_pred({0, 0}, c);
    CHECK_THROWS_WITH_AS(evaluate(m, data::Split::kTest, vids, preds),
                         doctest::Contains("short"), std::runtime_error);
  }
}

TEST_CASE("evaluate: split F1 equals brute-force recomputation, any threads") {
  for (const char* threads : {"1", "4"}) {
    ::setenv("SWR_THREADS", threads, 1);
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      Rng rng(31000 + seed, 0);
      const std::size_t c = 2 + rng.below(3);
      std::map<std::string, data::Video> vids;
      std::map<std::string, models::Prediction> preds;
      std::vector<std::string> ids = {"a", "b", "c"};
      double f1_expect = 0.0;
      for (const auto& id : ids) {
        const std::size_t t = 2 + rng.below(11);
        std::vector<std::uint16_t> labels(t);
        std::vector<std::size_t> track(t);
        for (std::size_t i = 0; i < t; ++i) {
          labels[i] = static_cast<std::uint16_t>(rng.below(c));
          track[i] = rng.below(c);
        }
        vids.emplace(id, make_video(id, labels, c));
        preds.emplace(id, make_pred(track, c));
        f1_expect += f1_oracle(track, labels, c) / 3.0;
      }
      const auto m = make_manifest(ids, c, models::LabelMode::kMulticlass);
      const SplitReport rep = evaluate(m, data::Split::kTest, vids, preds);
      CHECK(rep.means[3].first == "f1");
      CHECK(rep.means[3].second == doctest::Approx(f1_expect).epsilon(1e-12));
    }
  }
  ::unsetenv("SWR_THREADS");
}

TEST_CASE("evaluate: multilabel mAP and thresholded rates") {
  const std::size_t c = 2, t = 4;
  data::Video v;
  v.seq.video_id = "m";
  v.seq.features = Matrix(t, 1);
  v.labels.mode = data::LabelMode::kMultilabel;
  v.labels.num_classes = c;
  v.labels.mask = {1, 0,   //
                   1, 0,   //
                   0, 0,   //
                   1, 1};
  models::Prediction p;
  p.argmax_track = {};
  p.scores = Matrix(t, c);
  p.probabilities = Matrix(t, c);
  // class 0 scores rank frames [0,1,3] on top -> AP 1; predicted set at 0.5
  // threshold = {0,1,3}: tp=3 fp=0 fn=0
  p.probabilities(0, 0) = 0.9;
  p.probabilities(1, 0) = 0.8;
  p.probabilities(2, 0) = 0.2;
  p.probabilities(3, 0) = 0.7;
  // class 1: positives {3}, ranking [1, 3, ...] -> AP = 1/2; predicted {1}
  // at threshold: tp=0 fp=1 fn=1
  p.probabilities(0, 1) = 0.1;
  p.probabilities(1, 1) = 0.9;
  p.probabilities(2, 1) = 0.3;
  p.probabilities(3, 1) = 0.6;

  std::map<std::string, data::Video> vids;
  std::map<std::string, models::Prediction> preds;
  vids.emplace("m", v);
  preds.emplace("m", p);
  const auto man = make_manifest({"m"}, c, models::LabelMode::kMultilabel);
  const SplitReport rep = evaluate(man, data::Split::kTest, vids, preds);
  REQUIRE(rep.videos.size() == 1);
  const VideoMetrics& vm = rep.videos[0];
  CHECK(vm.ap_defined[0]);
  CHECK(vm.ap_per_class[0] == 1.0);
  CHECK(vm.ap_per_class[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(vm.mean_ap == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(rep.means[0].first == "map");
  CHECK(rep.means[0].second == doctest::Approx(0.75).epsilon(1e-12));
  // threshold 0.5 counts: class0 tp=3 fp=0; class1 tp=0 fp=2 (frames 1 and 3
  // have prob >= 0.5... frame 3 prob 0.6 is a tp? mask(3,1)=1 -> tp=1 fp=1)
  CHECK(vm.pr.counts[0].tp == 3);
  CHECK(vm.pr.counts[1].tp == 1);
  CHECK(vm.pr.counts[1].fp == 1);
}

TEST_CASE("evaluate: all-zero multilabel mask is an undefined-mAP error") {
  const std::size_t c = 2, t = 3;
  data::Video v;
  v.seq.video_id = "z";
  v.seq.features = Matrix(t, 1);
  v.labels.mode = data::LabelMode::kMultilabel;
  v.labels.num_classes = c;
  v.labels.mask.assign(t * c, 0);
  models::Prediction p;
  p.scores = Matrix(t, c);
  p.probabilities = Matrix(t, c);
  std::map<std::string, data::Video> vids;
  std::map<std::string, models::Prediction> preds;
  vids.emplace("z", v);
  preds.emplace("z", p);
  const auto man = make_manifest({"z"}, c, models::LabelMode::kMultilabel);
  CHECK_THROWS_WITH_AS(evaluate(man, data::Split::kTest, vids, preds),
                       doctest::Contains("z"), std::runtime_error);
}

TEST_CASE("aggregate_seeds: worked mean/std and the single-seed flag") {
  auto rep_with = [](double acc) {
    SplitReport r;
    r.means = {{"accuracy", acc}, {"f1", acc / 2.0}};
    return r;
  };
  const auto agg =
      aggregate_seeds({rep_with(0.85), rep_with(0.86), rep_with(0.87)});
  CHECK(!agg.single_seed);
  CHECK(agg.metrics[0].key == "accuracy");
  CHECK(agg.metrics[0].mean == doctest::Approx(0.86).epsilon(1e-12));
  CHECK(agg.metrics[0].stddev == doctest::Approx(0.01).epsilon(1e-9));

  const auto same = aggregate_seeds({rep_with(0.5), rep_with(0.5)});
  CHECK(same.metrics[0].stddev == 0.0);

  const auto one = aggregate_seeds({rep_with(0.7)});
  CHECK(one.single_seed);
  CHECK(one.metrics[0].mean == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(one.metrics[0].stddev == 0.0);

  SplitReport other;
  other.means = {{"map", 0.5}, {"f1", 0.2}};
  CHECK_THROWS_WITH_AS(aggregate_seeds({rep_with(0.5), other}),
                       doctest::Contains("inconsistent"),
                       std::invalid_argument);
}

TEST_CASE("comparison table renders percent cells in a fixed layout") {
  auto rep_with = [](double a, double f) {
    SplitReport r;
    r.means = {{"accuracy", a}, {"precision", a}, {"recall", a}, {"f1", f}};
    return r;
  };
  AggregateReport r1 =
      aggregate_seeds({rep_with(0.8737, 0.8208), rep_with(0.8737, 0.8208)});
  // pin the std to Table-1-like values for the golden string
  r1.metrics[0].mean = 0.8737;
  r1.metrics[0].stddev = 0.014;
  r1.metrics[3].mean = 0.8208;
  r1.metrics[3].stddev = 0.015;
  AggregateReport r2 = r1;
  r2.metrics[0].mean = 0.6231;
  r2.metrics[0].stddev = 0.012;
  r2.metrics[3].mean = 0.551;
  r2.metrics[3].stddev = 0.008;

  const std::string table =
      render_comparison_table({{"restcn", r1}, {"frame-mlp", r2}});
  CHECK(table ==
        "architecture  Acc           F1\n"
        "restcn        87.37±1.40    82.08±1.50\n"
        "frame-mlp     62.31±1.20    55.10±0.80\n");
}
