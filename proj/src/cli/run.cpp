#include "swr/cli/run.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "swr/data/checkpoint.hpp"
#include "swr/data/dataset.hpp"

namespace swr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
  std::vector<std::string> bad;
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) bad.push_back(key);
  if (bad.empty()) return;
  std::ostringstream os;
  os << where << ": unknown key" << (bad.size() == 1 ? "" : "s");
  for (std::size_t i = 0; i < bad.size(); ++i)
    os << (i ? ", " : " ") << '"' << bad[i] << '"';
  throw std::invalid_argument(os.str());
}

json history_to_json(const std::vector<train::EpochStats>& history) {
  json arr = json::array();
  for (const auto& e : history)
    arr.push_back(
        {{"epoch", e.epoch}, {"lr", e.lr}, {"mean_loss", e.mean_loss}});
  return arr;
}

json split_report_to_json(const eval::SplitReport& rep) {
  json j;
  j["split"] = data::split_name(rep.split);
  j["mode"] = models::label_mode_name(rep.mode);
  json means = json::object();
  for (const auto& [key, value] : rep.means) means[key] = value;
  j["means"] = means;
  const bool multiclass = rep.mode == models::LabelMode::kMulticlass;
  json vids = json::array();
  for (const auto& v : rep.videos) {
    json e;
    e["video_id"] = v.video_id;
    if (multiclass)
      e["accuracy"] = v.accuracy;
    else
      e["map"] = v.mean_ap;
    e["precision"] = v.mean_precision;
    e["recall"] = v.mean_recall;
    e["f1"] = v.f1;
    vids.push_back(e);
  }
  j["videos"] = vids;
  return j;
}

json aggregate_to_json(const RunConfig& cfg, const eval::AggregateReport& agg) {
  json j;
  j["model"] = cfg.model;
  j["seeds"] = cfg.seeds;
  j["single_seed"] = agg.single_seed;
  json metrics = json::array();
  for (const auto& m : agg.metrics)
    metrics.push_back(
        {{"key", m.key}, {"mean", m.mean}, {"stddev", m.stddev}});
  j["metrics"] = metrics;
  json per_seed = json::array();
  for (std::size_t i = 0; i < agg.per_seed.size(); ++i) {
    json means = json::object();
    for (const auto& [key, value] : agg.per_seed[i].means) means[key] = value;
    per_seed.push_back({{"seed", cfg.seeds[i]}, {"means", means}});
  }
  j["per_seed"] = per_seed;
  return j;
}

}  // namespace

RunConfig run_config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("run config: ") + e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("run config: expected a JSON object");
  reject_unknown_keys(
      j, {"manifest", "model", "out", "seeds", "train", "spec"}, "run config");
  RunConfig cfg;
  cfg.manifest = j.value("manifest", cfg.manifest);
  cfg.model = j.value("model", cfg.model);
  cfg.out = j.value("out", cfg.out);
  if (j.contains("seeds"))
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("train")) {
    const json& t = j.at("train");
    reject_unknown_keys(t,
                        {"epochs", "lr", "lr_decay", "lr_interval", "beta1",
                         "beta2", "eps", "frame_batch"},
                        "run config: train");
    cfg.train.epochs = t.value("epochs", cfg.train.epochs);
    cfg.train.lr = t.value("lr", cfg.train.lr);
    cfg.train.lr_decay = t.value("lr_decay", cfg.train.lr_decay);
    cfg.train.lr_interval = t.value("lr_interval", cfg.train.lr_interval);
    cfg.train.beta1 = t.value("beta1", cfg.train.beta1);
    cfg.train.beta2 = t.value("beta2", cfg.train.beta2);
    cfg.train.eps = t.value("eps", cfg.train.eps);
    cfg.train.frame_batch = t.value("frame_batch", cfg.train.frame_batch);
  }
  if (j.contains("spec")) {
    const json& s = j.at("spec");
    reject_unknown_keys(s,
                        {"frame_hidden", "clip_window", "hidden", "gru_layers",
                         "stages", "layers", "filters", "kernel"},
                        "run config: spec");
    cfg.frame_hidden = s.value("frame_hidden", cfg.frame_hidden);
    cfg.clip_window = s.value("clip_window", cfg.clip_window);
    cfg.hidden = s.value("hidden", cfg.hidden);
    cfg.gru_layers = s.value("gru_layers", cfg.gru_layers);
    cfg.stages = s.value("stages", cfg.stages);
    cfg.layers = s.value("layers", cfg.layers);
    cfg.filters = s.value("filters", cfg.filters);
    cfg.kernel = s.value("kernel", cfg.kernel);
  }
  return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
  json j;
  j["manifest"] = cfg.manifest;
  j["model"] = cfg.model;
  j["out"] = cfg.out;
  j["seeds"] = cfg.seeds;
  j["train"] = {{"epochs", cfg.train.epochs},
                {"lr", cfg.train.lr},
                {"lr_decay", cfg.train.lr_decay},
                {"lr_interval", cfg.train.lr_interval},
                {"beta1", cfg.train.beta1},
                {"beta2", cfg.train.beta2},
                {"eps", cfg.train.eps},
                {"frame_batch", cfg.train.frame_batch}};
  j["spec"] = {{"frame_hidden", cfg.frame_hidden},
               {"clip_window", cfg.clip_window},
               {"hidden", cfg.hidden},
               {"gru_layers", cfg.gru_layers},
               {"stages", cfg.stages},
               {"layers", cfg.layers},
               {"filters", cfg.filters},
               {"kernel", cfg.kernel}};
  return j.dump(2) + "\n";
}

eval::AggregateReport run_train_eval(const RunConfig& cfg, bool no_overwrite) {
  RunConfig c = cfg;
  std::sort(c.seeds.begin(), c.seeds.end());
  c.seeds.erase(std::unique(c.seeds.begin(), c.seeds.end()), c.seeds.end());
  if (c.seeds.empty())
    throw std::invalid_argument("train-eval: at least one seed is required");
  if (c.manifest.empty())
    throw std::invalid_argument("train-eval: a manifest path is required");
  if (c.out.empty())
    throw std::invalid_argument(
        "train-eval: an output directory is required");
  const models::ModelKind kind = models::parse_model_kind(c.model);
  c.model = models::model_kind_name(kind);

  const fs::path out(c.out);
  if (no_overwrite && fs::exists(out / "config.json"))
    throw std::runtime_error("train-eval: " + (out / "config.json").string() +
                             " exists; refusing to overwrite");
  fs::create_directories(out);
  spit(out / "config.json", run_config_to_json(c));
  spit(out / "INCOMPLETE", "run started but not finished\n");

  const data::Manifest man = data::load_manifest(c.manifest);
  models::ModelSpec spec;
  spec.kind = kind;
  spec.feature_dim = man.feature_dim;
  spec.num_classes = man.num_classes;
  spec.label_mode = man.mode;
  spec.frame_hidden = c.frame_hidden;
  spec.clip_window = c.clip_window;
  spec.hidden = c.hidden;
  spec.gru_layers = c.gru_layers;
  spec.stages = c.stages;
  spec.layers = c.layers;
  spec.filters = c.filters;
  spec.kernel = c.kernel;
  models::validate_spec(spec);

  std::map<std::string, data::Video> videos;
  std::vector<data::Video> train_videos;
  std::size_t test_count = 0;
  for (const auto& e : man.entries) {
    data::Video v = data::read_features(e.feature_path);
    if (e.split == data::Split::kTrain) train_videos.push_back(v);
    if (e.split == data::Split::kTest) ++test_count;
    videos.emplace(e.video_id, std::move(v));
  }
  if (train_videos.empty())
    throw std::runtime_error("train-eval: manifest has no train split");
  if (test_count == 0)
    throw std::runtime_error("train-eval: manifest has no test split");

  std::vector<eval::SplitReport> reports;
  for (const auto seed : c.seeds) {
    ParamStore params = models::init_params(spec, seed);
    train::TrainConfig tc = c.train;
    tc.seed = seed;
    const auto history = train::train(spec, params, train_videos, tc);

    const fs::path sdir = out / ("seed-" + std::to_string(seed));
    fs::create_directories(sdir);
    data::save_checkpoint(spec, params, (sdir / "checkpoint.swrc").string());
    spit(sdir / "history.json", history_to_json(history).dump(2) + "\n");

    std::map<std::string, models::Prediction> preds;
    for (const auto& e : man.entries)
      if (e.split == data::Split::kTest)
        preds.emplace(e.video_id,
                      models::model_predict(
                          spec, params, videos.at(e.video_id).seq.features));
    eval::SplitReport rep =
        eval::evaluate(man, data::Split::kTest, videos, preds);
    spit(sdir / "report.json", split_report_to_json(rep).dump(2) + "\n");
    reports.push_back(std::move(rep));
  }

  eval::AggregateReport agg = eval::aggregate_seeds(reports);
  spit(out / "aggregate.json", aggregate_to_json(c, agg).dump(2) + "\n");
  fs::remove(out / "INCOMPLETE");
  return agg;
}

SynthRun run_synth(const data::SynthConfig& cfg, double test_fraction,
                   const std::string& out_dir, bool no_overwrite) {
  data::validate_synth_config(cfg);
  if (out_dir.empty())
    throw std::invalid_argument("synth: an output directory is required");
  const fs::path out(out_dir);
  if (no_overwrite && fs::exists(out / "manifest.json"))
    throw std::runtime_error("synth: " + (out / "manifest.json").string() +
                             " exists; refusing to overwrite");
  fs::create_directories(out / "features");
  spit(out / "INCOMPLETE", "generation started but not finished\n");

  SynthRun run;
  run.dataset = data::synth_generate(cfg);

  data::Manifest m;
  m.dataset = "synth";
  m.num_classes = cfg.num_phases;
  m.mode = cfg.mode;
  m.feature_dim = cfg.feature_dim;
  json annotations = json::object();
  for (const auto& sv : run.dataset.videos) {
    const std::string rel = "features/" + sv.video.seq.video_id + ".swrf";
    data::write_features(sv.video.seq, sv.video.labels,
                         (out / rel).string());
    data::ManifestEntry e;
    e.video_id = sv.video.seq.video_id;
    e.group_id = sv.group_id;
    e.feature_path = rel;
    e.t_frames = sv.video.seq.features.rows;
    m.entries.push_back(e);
    annotations[sv.video.seq.video_id] = {{"group", sv.group_id},
                                          {"clusters", sv.cluster_ids},
                                          {"occluded", sv.occluded},
                                          {"shared", sv.shared}};
  }
  data::group_split(m, test_fraction, cfg.seed);
  data::save_manifest(m, (out / "manifest.json").string());
  spit(out / "annotations.json", annotations.dump(2) + "\n");

  SynthRunConfig rc;
  rc.generator = cfg;
  rc.test_fraction = test_fraction;
  spit(out / "config.json", synth_run_config_to_json(rc));

  if (cfg.mode == models::LabelMode::kMulticlass && cfg.noise_sigma == 0.0) {
    run.pooled_bound = data::framewise_bayes_bound(run.dataset);
    json per_video = json::object();
    double sums[2] = {0.0, 0.0};
    std::size_t counts[2] = {0, 0};
    for (std::size_t i = 0; i < run.dataset.videos.size(); ++i) {
      data::SynthDataset one;
      one.cfg = run.dataset.cfg;
      one.centroids = run.dataset.centroids;
      one.videos.push_back(run.dataset.videos[i]);
      const double b = data::framewise_bayes_bound(one);
      per_video[m.entries[i].video_id] = b;
      const int slot = m.entries[i].split == data::Split::kTest ? 1 : 0;
      sums[slot] += b;
      counts[slot] += 1;
    }
    run.train_bound_mean = counts[0] ? sums[0] / counts[0] : -1.0;
    run.test_bound_mean = counts[1] ? sums[1] / counts[1] : -1.0;
    json b;
    b["pooled"] = run.pooled_bound;
    b["per_video"] = per_video;
    b["split_mean"] = {{"train", run.train_bound_mean},
                       {"test", run.test_bound_mean}};
    spit(out / "bound.json", b.dump(2) + "\n");
  }

  run.manifest = std::move(m);
  fs::remove(out / "INCOMPLETE");
  return run;
}

std::vector<std::string> synth_preset_names() {
  return {"internal-7", "external-10"};
}

std::string synth_preset(const std::string& name) {
  // Two bundled benchmarks: a 7-phase noiseless multiclass set with both
  // ambiguity mechanisms (an exact accuracy ceiling applies), and a noisy
  // 10-class multilabel set for the mAP pipeline.
  if (name == "internal-7")
    return R"({
  "generator": {
    "num_phases": 7,
    "feature_dim": 16,
    "duration_range": [25, 45],
    "global_pairs": [[0, 6], [1, 5]],
    "occlusion": {"rate": 0.025, "min_len": 2, "max_len": 6},
    "noise_sigma": 0.0,
    "num_videos": 50,
    "videos_per_group": 2,
    "mode": "multiclass",
    "seed": 1
  },
  "test_fraction": 0.2
}
)";
  if (name == "external-10")
    return R"({
  "generator": {
    "num_phases": 10,
    "feature_dim": 16,
    "duration_range": [20, 40],
    "global_pairs": [[2, 7]],
    "occlusion": {"rate": 0.02, "min_len": 2, "max_len": 5},
    "noise_sigma": 0.25,
    "num_videos": 20,
    "videos_per_group": 2,
    "mode": "multilabel",
    "activity": {"min_len": 10, "max_len": 30},
    "seed": 7
  },
  "test_fraction": 0.2
}
)";
  std::string known;
  for (const auto& n : synth_preset_names())
    known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown preset \"" + name +
                              "\"; bundled: " + known);
}

SynthRunConfig synth_run_config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("synth config: ") + e.what());
  }
  SynthRunConfig cfg;
  if (j.is_object() && j.contains("generator")) {
    reject_unknown_keys(j, {"generator", "test_fraction"}, "synth config");
    cfg.generator = data::synth_config_from_json(j.at("generator").dump());
    cfg.test_fraction = j.value("test_fraction", cfg.test_fraction);
  } else {
    cfg.generator = data::synth_config_from_json(json_text);
  }
  return cfg;
}

std::string synth_run_config_to_json(const SynthRunConfig& cfg) {
  json j;
  j["generator"] = json::parse(data::synth_config_to_json(cfg.generator));
  j["test_fraction"] = cfg.test_fraction;
  return j.dump(2) + "\n";
}

std::string render_runs_table(const std::vector<std::string>& run_dirs) {
  if (run_dirs.empty())
    throw std::invalid_argument("report: at least one run directory");
  std::vector<std::pair<std::string, eval::AggregateReport>> rows;
  for (const auto& dir : run_dirs) {
    const fs::path agg_path = fs::path(dir) / "aggregate.json";
    if (!fs::exists(agg_path))
      throw std::runtime_error("report: no aggregate report in " + dir);
    json j;
    try {
      j = json::parse(slurp(agg_path));
    } catch (const json::parse_error& e) {
      throw std::runtime_error("report: " + agg_path.string() + ": " +
                               e.what());
    }
    eval::AggregateReport agg;
    agg.single_seed = j.value("single_seed", false);
    for (const auto& m : j.at("metrics"))
      agg.metrics.push_back({m.at("key").get<std::string>(),
                             m.at("mean").get<double>(),
                             m.at("stddev").get<double>()});
    rows.emplace_back(j.value("model", dir), std::move(agg));
  }
  return eval::render_comparison_table(rows);
}

}  // namespace swr::cli
