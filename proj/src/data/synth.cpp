#include "swr/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "swr/core/rng.hpp"
#include "swr/core/threads.hpp"

namespace swr::data {

using nlohmann::json;

namespace {

// Streams for Rng::derive; video streams use the video index directly, so
// auxiliary streams sit far above any plausible video count.
constexpr std::uint64_t kCentroidStream = 0xffffffff00000001ULL;
constexpr std::uint64_t kActivityDirStream = 0xffffffff00000002ULL;

constexpr double kActivityGain = 0.5;  // feature shift per active label

std::string zero_pad(std::size_t v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

void validate_synth_config(const SynthConfig& cfg) {
  std::vector<std::string> bad;
  if (cfg.num_phases < 2) bad.push_back("num_phases must be >= 2");
  if (cfg.feature_dim < 1) bad.push_back("feature_dim must be >= 1");
  if (cfg.durations.size() != cfg.num_phases)
    bad.push_back("durations must list one [min,max] pair per phase (" +
                  std::to_string(cfg.durations.size()) + " given for " +
                  std::to_string(cfg.num_phases) + " phases)");
  for (std::size_t i = 0; i < cfg.durations.size(); ++i) {
    const auto& [lo, hi] = cfg.durations[i];
    if (lo < 1)
      bad.push_back("phase " + std::to_string(i) + ": min duration must be >= 1");
    if (lo > hi)
      bad.push_back("phase " + std::to_string(i) + ": min duration exceeds max");
  }
  std::vector<int> pair_uses(cfg.num_phases, 0);
  for (const auto& [a, b] : cfg.global_pairs) {
    if (a >= cfg.num_phases || b >= cfg.num_phases)
      bad.push_back("global pair (" + std::to_string(a) + "," +
                    std::to_string(b) + ") references a phase out of range");
    else if (a == b)
      bad.push_back("global pair (" + std::to_string(a) + "," +
                    std::to_string(b) + ") repeats one phase");
    else {
      if (++pair_uses[a] > 1)
        bad.push_back("phase " + std::to_string(a) + " appears in multiple global pairs");
      if (++pair_uses[b] > 1)
        bad.push_back("phase " + std::to_string(b) + " appears in multiple global pairs");
    }
  }
  if (cfg.occlusion_rate < 0.0 || cfg.occlusion_rate > 1.0)
    bad.push_back("occlusion rate must lie in [0,1]");
  if (cfg.occlusion_min < 1) bad.push_back("occlusion min length must be >= 1");
  if (cfg.occlusion_min > cfg.occlusion_max)
    bad.push_back("occlusion min length exceeds max");
  if (cfg.noise_sigma < 0.0) bad.push_back("noise sigma must be >= 0");
  if (cfg.num_videos < 1) bad.push_back("num_videos must be >= 1");
  if (cfg.videos_per_group < 1) bad.push_back("videos_per_group must be >= 1");
  if (cfg.mode == LabelMode::kMultilabel) {
    if (cfg.activity_min < 1) bad.push_back("activity min length must be >= 1");
    if (cfg.activity_min > cfg.activity_max)
      bad.push_back("activity min length exceeds max");
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "synth config: " << bad.size() << " problem"
       << (bad.size() == 1 ? "" : "s");
    for (const auto& b : bad) os << "\n  - " << b;
    throw std::invalid_argument(os.str());
  }
}

SynthConfig synth_config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("synth config: ") + e.what());
  }
  SynthConfig cfg;
  cfg.num_phases = j.value("num_phases", cfg.num_phases);
  cfg.feature_dim = j.value("feature_dim", cfg.feature_dim);
  cfg.durations.clear();
  if (j.contains("durations")) {
    for (const auto& d : j.at("durations"))
      cfg.durations.emplace_back(d.at(0).get<std::size_t>(),
                                 d.at(1).get<std::size_t>());
  } else if (j.contains("duration_range")) {
    // one shared [min,max] for every phase
    const auto& d = j.at("duration_range");
    cfg.durations.assign(cfg.num_phases,
                         {d.at(0).get<std::size_t>(), d.at(1).get<std::size_t>()});
  }
  if (j.contains("global_pairs"))
    for (const auto& p : j.at("global_pairs"))
      cfg.global_pairs.emplace_back(p.at(0).get<std::size_t>(),
                                    p.at(1).get<std::size_t>());
  if (j.contains("occlusion")) {
    const auto& o = j.at("occlusion");
    cfg.occlusion_rate = o.value("rate", cfg.occlusion_rate);
    cfg.occlusion_min = o.value("min_len", cfg.occlusion_min);
    cfg.occlusion_max = o.value("max_len", cfg.occlusion_max);
  }
  cfg.noise_sigma = j.value("noise_sigma", cfg.noise_sigma);
  cfg.num_videos = j.value("num_videos", cfg.num_videos);
  cfg.videos_per_group = j.value("videos_per_group", cfg.videos_per_group);
  if (j.contains("mode"))
    cfg.mode = models::parse_label_mode(j.at("mode").get<std::string>());
  if (j.contains("activity")) {
    const auto& a = j.at("activity");
    cfg.activity_min = a.value("min_len", cfg.activity_min);
    cfg.activity_max = a.value("max_len", cfg.activity_max);
  }
  cfg.seed = j.value("seed", cfg.seed);
  validate_synth_config(cfg);
  return cfg;
}

std::string synth_config_to_json(const SynthConfig& cfg) {
  json j;
  j["num_phases"] = cfg.num_phases;
  j["feature_dim"] = cfg.feature_dim;
  j["durations"] = json::array();
  for (const auto& [lo, hi] : cfg.durations)
    j["durations"].push_back({lo, hi});
  j["global_pairs"] = json::array();
  for (const auto& [a, b] : cfg.global_pairs) j["global_pairs"].push_back({a, b});
  j["occlusion"] = {{"rate", cfg.occlusion_rate},
                    {"min_len", cfg.occlusion_min},
                    {"max_len", cfg.occlusion_max}};
  j["noise_sigma"] = cfg.noise_sigma;
  j["num_videos"] = cfg.num_videos;
  j["videos_per_group"] = cfg.videos_per_group;
  j["mode"] = models::label_mode_name(cfg.mode);
  j["activity"] = {{"min_len", cfg.activity_min}, {"max_len", cfg.activity_max}};
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

namespace {

Matrix unit_rows(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double norm2 = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = rng.normal();
      norm2 += m(r, c) * m(r, c);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t c = 0; c < cols; ++c) m(r, c) *= inv;
  }
  return m;
}

}  // namespace

SynthDataset synth_generate(const SynthConfig& cfg) {
  validate_synth_config(cfg);
  SynthDataset ds;
  ds.cfg = cfg;

  // Phase -> emitting cluster; global pairs collapse onto the smaller id.
  std::vector<std::size_t> cluster_of(cfg.num_phases);
  for (std::size_t p = 0; p < cfg.num_phases; ++p) cluster_of[p] = p;
  for (const auto& [a, b] : cfg.global_pairs)
    cluster_of[std::max(a, b)] = std::min(a, b);
  std::vector<std::uint8_t> cluster_shared(cfg.num_phases + 1, 0);
  for (const auto& [a, b] : cfg.global_pairs) cluster_shared[std::min(a, b)] = 1;
  const std::size_t occlusion_cluster = cfg.num_phases;  // last centroid row

  Rng crng = Rng::derive(cfg.seed, kCentroidStream);
  ds.centroids = unit_rows(crng, cfg.num_phases + 1, cfg.feature_dim);
  Matrix activity_dirs;
  if (cfg.mode == LabelMode::kMultilabel) {
    Rng arng = Rng::derive(cfg.seed, kActivityDirStream);
    activity_dirs = unit_rows(arng, cfg.num_phases, cfg.feature_dim);
  }

  const int id_width = cfg.num_videos > 999 ? 6 : 3;
  ds.videos.resize(cfg.num_videos);
  parallel_for(cfg.num_videos, [&](std::size_t v) {
    Rng rng = Rng::derive(cfg.seed, v);
    SynthVideo& out = ds.videos[v];
    out.group_id = "g" + zero_pad(v / cfg.videos_per_group, id_width);
    out.video.seq.video_id = "v" + zero_pad(v, id_width);

    // 1) phase durations
    std::vector<std::size_t> phase_of_frame;
    for (std::size_t p = 0; p < cfg.num_phases; ++p) {
      const auto& [lo, hi] = cfg.durations[p];
      const std::size_t len = lo + rng.below(hi - lo + 1);
      phase_of_frame.insert(phase_of_frame.end(), len, p);
    }
    const std::size_t t_len = phase_of_frame.size();

    // 2) multilabel activity tracks: per class, alternating off/on segments
    std::vector<std::uint8_t> active;
    if (cfg.mode == LabelMode::kMultilabel) {
      active.assign(t_len * cfg.num_phases, 0);
      for (std::size_t c = 0; c < cfg.num_phases; ++c) {
        std::uint8_t state = static_cast<std::uint8_t>(rng.below(2));
        std::size_t t = 0;
        while (t < t_len) {
          const std::size_t len =
              cfg.activity_min +
              rng.below(cfg.activity_max - cfg.activity_min + 1);
          for (std::size_t i = 0; i < len && t < t_len; ++i, ++t)
            active[t * cfg.num_phases + c] = state;
          state = static_cast<std::uint8_t>(1 - state);
        }
      }
    }

    // 3) occlusion spans: a fresh span may start on any unoccluded frame
    out.occluded.assign(t_len, 0);
    for (std::size_t t = 0; t < t_len; ++t) {
      if (out.occluded[t]) continue;
      if (rng.uniform() < cfg.occlusion_rate) {
        const std::size_t len =
            cfg.occlusion_min +
            rng.below(cfg.occlusion_max - cfg.occlusion_min + 1);
        for (std::size_t i = t; i < std::min(t_len, t + len); ++i)
          out.occluded[i] = 1;
      }
    }

    // 4) emission
    out.cluster_ids.resize(t_len);
    out.shared.assign(t_len, 0);
    Matrix feats(t_len, cfg.feature_dim);
    for (std::size_t t = 0; t < t_len; ++t) {
      const std::size_t cluster =
          out.occluded[t] ? occlusion_cluster : cluster_of[phase_of_frame[t]];
      out.cluster_ids[t] = static_cast<std::uint16_t>(cluster);
      out.shared[t] = out.occluded[t] ? 0 : cluster_shared[cluster];
      const double* base = ds.centroids.row(cluster);
      double* row = feats.row(t);
      for (std::size_t j = 0; j < cfg.feature_dim; ++j) row[j] = base[j];
      if (cfg.mode == LabelMode::kMultilabel && !out.occluded[t]) {
        for (std::size_t c = 0; c < cfg.num_phases; ++c)
          if (active[t * cfg.num_phases + c])
            for (std::size_t j = 0; j < cfg.feature_dim; ++j)
              row[j] += kActivityGain * activity_dirs(c, j);
      }
      if (cfg.noise_sigma > 0.0)
        for (std::size_t j = 0; j < cfg.feature_dim; ++j)
          row[j] += cfg.noise_sigma * rng.normal();
    }
    out.video.seq.features = std::move(feats);

    out.video.labels.num_classes = cfg.num_phases;
    out.video.labels.mode = cfg.mode;
    if (cfg.mode == LabelMode::kMulticlass) {
      out.video.labels.classes.resize(t_len);
      for (std::size_t t = 0; t < t_len; ++t)
        out.video.labels.classes[t] =
            static_cast<std::uint16_t>(phase_of_frame[t]);
    } else {
      out.video.labels.mask = std::move(active);
    }
  });
  return ds;
}

double framewise_bayes_bound(const SynthDataset& ds) {
  if (ds.cfg.noise_sigma > 0.0)
    throw std::invalid_argument(
        "framewise_bayes_bound: exact only for sigma = 0 datasets (got sigma " +
        std::to_string(ds.cfg.noise_sigma) + ")");
  if (ds.cfg.mode != LabelMode::kMulticlass)
    throw std::invalid_argument(
        "framewise_bayes_bound: defined for multiclass datasets only");
  // cluster id -> per-class frame counts
  std::map<std::uint16_t, std::vector<std::size_t>> counts;
  std::size_t total = 0;
  for (const auto& v : ds.videos) {
    const auto& labels = v.video.labels.classes;
    for (std::size_t t = 0; t < labels.size(); ++t) {
      auto& c = counts[v.cluster_ids[t]];
      if (c.empty()) c.assign(ds.cfg.num_phases, 0);
      ++c[labels[t]];
      ++total;
    }
  }
  std::size_t attainable = 0;
  for (const auto& [cluster, per_class] : counts)
    attainable += *std::max_element(per_class.begin(), per_class.end());
  return static_cast<double>(attainable) / static_cast<double>(total);
}

}  // namespace swr::data
