#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "swr/data/manifest.hpp"
#include "swr/models/model.hpp"

namespace swr::eval {

struct ClassCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

// Per-class frame counts and the rates derived from them. A precision is
// defined only when the class was ever predicted, a recall only when it ever
// occurs in the ground truth; undefined classes are skipped from averages
// rather than scored 0 or 1.
struct PerClassPR {
  std::vector<ClassCounts> counts;
  std::vector<double> precision, recall;  // meaningful where the flag is set
  std::vector<std::uint8_t> p_defined, r_defined;
};

// Fraction of frames whose argmax equals the label.
double video_accuracy(const std::vector<std::size_t>& pred,
                      const std::vector<std::uint16_t>& labels);

PerClassPR per_class_pr(const std::vector<std::size_t>& pred,
                        const std::vector<std::uint16_t>& labels,
                        std::size_t num_classes);

struct F1Summary {
  double mean_precision = 0.0, mean_recall = 0.0, f1 = 0.0;
};

// Means over the defined classes, then F1 = 2PR/(P+R) of those means (0 when
// both means are 0). Throws std::invalid_argument when no class defines
// either rate.
F1Summary f1_video(const PerClassPR& pr);

// Frames ranked by descending score, ties broken by ascending frame index;
// AP = sum over positive-holding ranks of (delta recall) * precision@rank.
// Throws std::invalid_argument when labels hold no positive frame.
double average_precision(const std::vector<double>& scores,
                         const std::vector<std::uint8_t>& labels);

struct VideoMetrics {
  std::string video_id;
  // multiclass
  double accuracy = 0.0;
  // both modes (multilabel rates use the 0.5 probability threshold)
  double mean_precision = 0.0, mean_recall = 0.0, f1 = 0.0;
  PerClassPR pr;
  // multilabel
  std::vector<double> ap_per_class;
  std::vector<std::uint8_t> ap_defined;
  double mean_ap = 0.0;
};

struct SplitReport {
  data::Split split = data::Split::kTest;
  models::LabelMode mode = models::LabelMode::kMulticlass;
  std::vector<VideoMetrics> videos;  // manifest order
  // unweighted means over videos; keys "accuracy","precision","recall","f1"
  // (multiclass) or "map","precision","recall","f1" (multilabel)
  std::vector<std::pair<std::string, double>> means;
};

// Scores every split video against its prediction and averages with equal
// video weight. Validation runs serially in manifest order (first problem
// raises std::runtime_error naming the video); the per-video metric work is
// pure and parallel, merged back in manifest order.
SplitReport evaluate(const data::Manifest& manifest, data::Split split,
                     const std::map<std::string, data::Video>& videos,
                     const std::map<std::string, models::Prediction>& preds);

struct AggregateMetric {
  std::string key;
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1); 0 for a single seed
};

struct AggregateReport {
  std::vector<SplitReport> per_seed;
  std::vector<AggregateMetric> metrics;
  bool single_seed = false;
};

// Cross-seed mean and sample standard deviation of the split-level means.
// Reports must carry identical metric keys in identical order.
AggregateReport aggregate_seeds(const std::vector<SplitReport>& reports);

// Fixed-width comparison table, one row per architecture: columns Acc/F1 for
// multiclass aggregates, mAP/F1 for multilabel, entries "mean±std" in percent.
std::string render_comparison_table(
    const std::vector<std::pair<std::string, AggregateReport>>& rows);

}  // namespace swr::eval
