#include "swr/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "swr/core/threads.hpp"

namespace swr::eval {

double video_accuracy(const std::vector<std::size_t>& pred,
                      const std::vector<std::uint16_t>& labels) {
  if (pred.size() != labels.size())
    throw std::invalid_argument(
        "video_accuracy: " + std::to_string(pred.size()) + " predictions vs " +
        std::to_string(labels.size()) + " labels");
  if (pred.empty())
    throw std::invalid_argument("video_accuracy: empty tracks");
  std::size_t hit = 0;
  for (std::size_t t = 0; t < pred.size(); ++t)
    if (pred[t] == labels[t]) ++hit;
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

PerClassPR per_class_pr(const std::vector<std::size_t>& pred,
                        const std::vector<std::uint16_t>& labels,
                        std::size_t num_classes) {
  if (pred.size() != labels.size())
    throw std::invalid_argument(
        "per_class_pr: " + std::to_string(pred.size()) + " predictions vs " +
        std::to_string(labels.size()) + " labels");
  PerClassPR pr;
  pr.counts.resize(num_classes);
  for (std::size_t t = 0; t < pred.size(); ++t) {
    const std::size_t p = pred[t], y = labels[t];
    if (p >= num_classes)
      throw std::invalid_argument("per_class_pr: frame " + std::to_string(t) +
                                  ": predicted class " + std::to_string(p) +
                                  " out of range");
    if (y >= num_classes)
      throw std::invalid_argument("per_class_pr: frame " + std::to_string(t) +
                                  ": label " + std::to_string(y) +
                                  " out of range");
    if (p == y) {
      ++pr.counts[p].tp;
    } else {
      ++pr.counts[p].fp;
      ++pr.counts[y].fn;
    }
  }
  pr.precision.assign(num_classes, 0.0);
  pr.recall.assign(num_classes, 0.0);
  pr.p_defined.assign(num_classes, 0);
  pr.r_defined.assign(num_classes, 0);
  for (std::size_t c = 0; c < num_classes; ++c) {
    const auto& k = pr.counts[c];
    if (k.tp + k.fp > 0) {
      pr.p_defined[c] = 1;
      pr.precision[c] =
          static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fp);
    }
    if (k.tp + k.fn > 0) {
      pr.r_defined[c] = 1;
      pr.recall[c] =
          static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fn);
    }
  }
  return pr;
}

F1Summary f1_video(const PerClassPR& pr) {
  double psum = 0.0, rsum = 0.0;
  std::size_t pn = 0, rn = 0;
  for (std::size_t c = 0; c < pr.counts.size(); ++c) {
    if (pr.p_defined[c]) {
      psum += pr.precision[c];
      ++pn;
    }
    if (pr.r_defined[c]) {
      rsum += pr.recall[c];
      ++rn;
    }
  }
  if (pn == 0 && rn == 0)
    throw std::invalid_argument("f1_video: no class defines either rate");
  F1Summary s;
  s.mean_precision = pn ? psum / static_cast<double>(pn) : 0.0;
  s.mean_recall = rn ? rsum / static_cast<double>(rn) : 0.0;
  const double d = s.mean_precision + s.mean_recall;
  s.f1 = d > 0.0 ? 2.0 * s.mean_precision * s.mean_recall / d : 0.0;
  return s;
}

double average_precision(const std::vector<double>& scores,
                         const std::vector<std::uint8_t>& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument(
        "average_precision: " + std::to_string(scores.size()) + " scores vs " +
        std::to_string(labels.size()) + " labels");
  std::size_t total_pos = 0;
  for (std::uint8_t y : labels) {
    if (y > 1)
      throw std::invalid_argument(
          "average_precision: labels must be binary");
    total_pos += y;
  }
  if (total_pos == 0)
    throw std::invalid_argument("average_precision: no positive frames");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];  // stable keeps ascending index on ties
  });
  double ap = 0.0;
  std::size_t pos_seen = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (labels[order[k]] == 1) {
      ++pos_seen;
      const double precision_at_k =
          static_cast<double>(pos_seen) / static_cast<double>(k + 1);
      ap += precision_at_k / static_cast<double>(total_pos);
    }
  }
  return ap;
}

namespace {

// Per-class binary counts of thresholded multilabel predictions. A class with
// no predicted and no actual positives stays undefined on both rates.
PerClassPR multilabel_pr(const Matrix& probabilities,
                         const std::vector<std::uint8_t>& mask,
                         std::size_t num_classes) {
  PerClassPR pr;
  pr.counts.resize(num_classes);
  const std::size_t t_len = probabilities.rows;
  for (std::size_t t = 0; t < t_len; ++t)
    for (std::size_t c = 0; c < num_classes; ++c) {
      const bool hat = probabilities(t, c) >= 0.5;
      const bool truth = mask[t * num_classes + c] == 1;
      if (hat && truth)
        ++pr.counts[c].tp;
      else if (hat)
        ++pr.counts[c].fp;
      else if (truth)
        ++pr.counts[c].fn;
    }
  pr.precision.assign(num_classes, 0.0);
  pr.recall.assign(num_classes, 0.0);
  pr.p_defined.assign(num_classes, 0);
  pr.r_defined.assign(num_classes, 0);
  for (std::size_t c = 0; c < num_classes; ++c) {
    const auto& k = pr.counts[c];
    if (k.tp + k.fp > 0) {
      pr.p_defined[c] = 1;
      pr.precision[c] =
          static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fp);
    }
    if (k.tp + k.fn > 0) {
      pr.r_defined[c] = 1;
      pr.recall[c] =
          static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fn);
    }
  }
  return pr;
}

VideoMetrics score_multiclass(const std::string& id, const data::Video& v,
                              const models::Prediction& p,
                              std::size_t num_classes) {
  VideoMetrics m;
  m.video_id = id;
  m.accuracy = video_accuracy(p.argmax_track, v.labels.classes);
  m.pr = per_class_pr(p.argmax_track, v.labels.classes, num_classes);
  const F1Summary f = f1_video(m.pr);
  m.mean_precision = f.mean_precision;
  m.mean_recall = f.mean_recall;
  m.f1 = f.f1;
  return m;
}

VideoMetrics score_multilabel(const std::string& id, const data::Video& v,
                              const models::Prediction& p,
                              std::size_t num_classes) {
  VideoMetrics m;
  m.video_id = id;
  const std::size_t t_len = v.seq.features.rows;
  m.ap_per_class.assign(num_classes, 0.0);
  m.ap_defined.assign(num_classes, 0);
  double ap_sum = 0.0;
  std::size_t ap_n = 0;
  std::vector<double> col(t_len);
  std::vector<std::uint8_t> truth(t_len);
  for (std::size_t c = 0; c < num_classes; ++c) {
    std::size_t pos = 0;
    for (std::size_t t = 0; t < t_len; ++t) {
      col[t] = p.probabilities(t, c);
      truth[t] = v.labels.mask[t * num_classes + c];
      pos += truth[t];
    }
    if (pos == 0) continue;  // AP undefined for this class on this video
    m.ap_defined[c] = 1;
    m.ap_per_class[c] = average_precision(col, truth);
    ap_sum += m.ap_per_class[c];
    ++ap_n;
  }
  if (ap_n == 0)
    throw std::runtime_error("video " + id +
                             ": no class has a positive frame; mAP undefined");
  m.mean_ap = ap_sum / static_cast<double>(ap_n);
  m.pr = multilabel_pr(p.probabilities, v.labels.mask, num_classes);
  const F1Summary f = f1_video(m.pr);
  m.mean_precision = f.mean_precision;
  m.mean_recall = f.mean_recall;
  m.f1 = f.f1;
  return m;
}

}  // namespace

SplitReport evaluate(const data::Manifest& manifest, data::Split split,
                     const std::map<std::string, data::Video>& videos,
                     const std::map<std::string, models::Prediction>& preds) {
  SplitReport rep;
  rep.split = split;
  rep.mode = manifest.mode;
  const bool multiclass = manifest.mode == models::LabelMode::kMulticlass;

  struct Item {
    const data::ManifestEntry* entry;
    const data::Video* video;
    const models::Prediction* pred;
  };
  std::vector<Item> items;
  for (const auto& e : manifest.entries) {
    if (e.split != split) continue;
    const auto vit = videos.find(e.video_id);
    if (vit == videos.end())
      throw std::runtime_error("evaluate: no loaded video for " + e.video_id);
    const auto pit = preds.find(e.video_id);
    if (pit == preds.end())
      throw std::runtime_error("evaluate: no prediction for " + e.video_id);
    const data::Video& v = vit->second;
    const models::Prediction& p = pit->second;
    const std::size_t t_len = v.seq.features.rows;
    if (v.labels.length() != t_len)
      throw std::runtime_error("evaluate: video " + e.video_id +
                               ": label length does not match frames");
    if (multiclass) {
      if (p.argmax_track.size() != t_len)
        throw std::runtime_error(
            "evaluate: video " + e.video_id + ": prediction covers " +
            std::to_string(p.argmax_track.size()) + " frames, video has " +
            std::to_string(t_len));
    } else if (p.probabilities.rows != t_len ||
               p.probabilities.cols != manifest.num_classes) {
      throw std::runtime_error(
          "evaluate: video " + e.video_id + ": probabilities are " +
          p.probabilities.shape_str() + ", expected " + std::to_string(t_len) +
          "x" + std::to_string(manifest.num_classes));
    }
    items.push_back({&e, &v, &p});
  }
  if (items.empty())
    throw std::runtime_error("evaluate: split holds no videos");

  rep.videos.resize(items.size());
  parallel_for(items.size(), [&](std::size_t i) {
    const Item& it = items[i];
    rep.videos[i] = multiclass
                        ? score_multiclass(it.entry->video_id, *it.video,
                                           *it.pred, manifest.num_classes)
                        : score_multilabel(it.entry->video_id, *it.video,
                                           *it.pred, manifest.num_classes);
  });

  const double n = static_cast<double>(rep.videos.size());
  double head = 0.0, psum = 0.0, rsum = 0.0, fsum = 0.0;
  for (const auto& m : rep.videos) {
    head += multiclass ? m.accuracy : m.mean_ap;
    psum += m.mean_precision;
    rsum += m.mean_recall;
    fsum += m.f1;
  }
  rep.means.emplace_back(multiclass ? "accuracy" : "map", head / n);
  rep.means.emplace_back("precision", psum / n);
  rep.means.emplace_back("recall", rsum / n);
  rep.means.emplace_back("f1", fsum / n);
  return rep;
}

AggregateReport aggregate_seeds(const std::vector<SplitReport>& reports) {
  if (reports.empty())
    throw std::invalid_argument("aggregate_seeds: no reports");
  for (const auto& r : reports) {
    if (r.means.size() != reports[0].means.size())
      throw std::invalid_argument("aggregate_seeds: inconsistent metric keys");
    for (std::size_t i = 0; i < r.means.size(); ++i)
      if (r.means[i].first != reports[0].means[i].first)
        throw std::invalid_argument(
            "aggregate_seeds: inconsistent metric keys (\"" +
            r.means[i].first + "\" vs \"" + reports[0].means[i].first + "\")");
  }
  AggregateReport agg;
  agg.per_seed = reports;
  agg.single_seed = reports.size() == 1;
  const double n = static_cast<double>(reports.size());
  for (std::size_t i = 0; i < reports[0].means.size(); ++i) {
    AggregateMetric m;
    m.key = reports[0].means[i].first;
    for (const auto& r : reports) m.mean += r.means[i].second;
    m.mean /= n;
    if (reports.size() > 1) {
      double ss = 0.0;
      for (const auto& r : reports) {
        const double d = r.means[i].second - m.mean;
        ss += d * d;
      }
      m.stddev = std::sqrt(ss / (n - 1.0));
    }
    agg.metrics.push_back(m);
  }
  return agg;
}

namespace {

const AggregateMetric* find_metric(const AggregateReport& r,
                                   const std::string& key) {
  for (const auto& m : r.metrics)
    if (m.key == key) return &m;
  return nullptr;
}

// Pads to a display width; the ± glyph is two bytes but one column.
std::string pad_display(const std::string& s, std::size_t width) {
  std::size_t cols = 0;
  for (unsigned char ch : s)
    if ((ch & 0xC0) != 0x80) ++cols;
  std::string out = s;
  while (cols < width) {
    out.push_back(' ');
    ++cols;
  }
  return out;
}

std::string cell(const AggregateMetric* m) {
  if (!m) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f±%.2f", 100.0 * m->mean,
                100.0 * m->stddev);
  return buf;
}

}  // namespace

std::string render_comparison_table(
    const std::vector<std::pair<std::string, AggregateReport>>& rows) {
  if (rows.empty())
    throw std::invalid_argument("render_comparison_table: no rows");
  const bool multiclass = find_metric(rows[0].second, "accuracy") != nullptr;
  std::size_t name_w = 12;
  for (const auto& [name, agg] : rows) name_w = std::max(name_w, name.size());
  name_w += 2;
  const std::size_t val_w = 14;

  std::string out = pad_display("architecture", name_w) +
                    pad_display(multiclass ? "Acc" : "mAP", val_w) + "F1\n";
  for (const auto& [name, agg] : rows) {
    out += pad_display(name, name_w);
    out += pad_display(cell(find_metric(agg, multiclass ? "accuracy" : "map")),
                       val_w);
    out += cell(find_metric(agg, "f1"));
    out += "\n";
  }
  return out;
}

}  // namespace swr::eval
