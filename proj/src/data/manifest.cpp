#include "swr/data/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "swr/core/rng.hpp"

namespace swr::data {

namespace fs = std::filesystem;
using nlohmann::json;

std::string split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kTest: return "test";
    case Split::kUnassigned: return "unassigned";
  }
  throw std::invalid_argument("unknown split");
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  if (name == "unassigned") return Split::kUnassigned;
  throw std::invalid_argument("unknown split \"" + name +
                              "\"; valid: train, test, unassigned");
}

namespace {

[[noreturn]] void itemized_error(const std::string& path,
                                 const std::vector<std::string>& problems) {
  std::ostringstream os;
  os << "manifest " << path << ": " << problems.size() << " problem"
     << (problems.size() == 1 ? "" : "s");
  for (const auto& p : problems) os << "\n  - " << p;
  throw std::runtime_error(os.str());
}

}  // namespace

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("manifest " + path + ": " + e.what());
  }

  std::vector<std::string> problems;
  auto need = [&](const json& node, const char* key, const std::string& where) -> const json* {
    if (!node.contains(key)) {
      problems.push_back(where + ": missing field \"" + key + "\"");
      return nullptr;
    }
    return &node.at(key);
  };

  Manifest m;
  if (const json* v = need(j, "dataset", "top level")) m.dataset = v->get<std::string>();
  if (const json* v = need(j, "num_classes", "top level"))
    m.num_classes = v->get<std::size_t>();
  if (const json* v = need(j, "mode", "top level")) {
    try {
      m.mode = models::parse_label_mode(v->get<std::string>());
    } catch (const std::invalid_argument& e) {
      problems.push_back(std::string("top level: ") + e.what());
    }
  }
  if (const json* v = need(j, "feature_dim", "top level"))
    m.feature_dim = v->get<std::size_t>();

  const fs::path base = fs::path(path).parent_path();
  std::set<std::string> seen_ids;
  if (const json* entries = need(j, "entries", "top level")) {
    std::size_t idx = 0;
    for (const auto& e : *entries) {
      const std::string where = "entry " + std::to_string(idx);
      ManifestEntry entry;
      if (const json* v = need(e, "video_id", where)) entry.video_id = v->get<std::string>();
      if (const json* v = need(e, "group_id", where)) entry.group_id = v->get<std::string>();
      if (const json* v = need(e, "feature_path", where))
        entry.feature_path = v->get<std::string>();
      if (const json* v = need(e, "split", where)) {
        try {
          entry.split = parse_split(v->get<std::string>());
        } catch (const std::invalid_argument& ex) {
          problems.push_back(where + ": " + ex.what());
        }
      }
      if (!entry.video_id.empty()) {
        if (!seen_ids.insert(entry.video_id).second)
          problems.push_back(where + ": duplicate video_id \"" +
                             entry.video_id + "\"");
      }
      if (!entry.feature_path.empty()) {
        fs::path p(entry.feature_path);
        if (p.is_relative()) p = base / p;
        entry.feature_path = p.string();
        try {
          const SwrfHeader h = read_features_header(entry.feature_path);
          entry.t_frames = h.t;
          if (h.d != m.feature_dim)
            problems.push_back(where + " (" + entry.video_id + "): feature dim " +
                               std::to_string(h.d) + " != manifest feature_dim " +
                               std::to_string(m.feature_dim));
          if (h.c != m.num_classes)
            problems.push_back(where + " (" + entry.video_id + "): class count " +
                               std::to_string(h.c) + " != manifest num_classes " +
                               std::to_string(m.num_classes));
          if (h.mode != m.mode)
            problems.push_back(where + " (" + entry.video_id +
                               "): label mode mismatch with manifest");
        } catch (const std::exception& ex) {
          problems.push_back(where + ": " + ex.what());
        }
      }
      m.entries.push_back(std::move(entry));
      ++idx;
    }
    if (m.entries.empty()) problems.push_back("entries: manifest lists no videos");
  }

  if (!problems.empty()) itemized_error(path, problems);
  return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
  const fs::path base = fs::path(path).parent_path();
  json j;
  j["dataset"] = m.dataset;
  j["num_classes"] = m.num_classes;
  j["mode"] = models::label_mode_name(m.mode);
  j["feature_dim"] = m.feature_dim;
  j["entries"] = json::array();
  for (const auto& e : m.entries) {
    // Store paths relative to the manifest when possible, for portability.
    fs::path p(e.feature_path);
    std::string stored = p.string();
    if (!base.empty()) {
      std::error_code ec;
      const fs::path rel = fs::relative(p, base, ec);
      if (!ec && !rel.empty()) stored = rel.string();
    }
    j["entries"].push_back({{"video_id", e.video_id},
                            {"group_id", e.group_id},
                            {"feature_path", stored},
                            {"split", split_name(e.split)}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open manifest " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failure on manifest " + path);
}

void group_split(Manifest& m, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("group_split: test_fraction must be in (0,1)");
  std::vector<std::string> groups;  // first-appearance order
  std::map<std::string, std::size_t> frames_of;
  std::size_t total_frames = 0;
  for (const auto& e : m.entries) {
    if (e.t_frames == 0)
      throw std::invalid_argument(
          "group_split: entry " + e.video_id +
          " has no frame count; load the manifest (or generate) first");
    if (!frames_of.count(e.group_id)) groups.push_back(e.group_id);
    frames_of[e.group_id] += e.t_frames;
    total_frames += e.t_frames;
  }
  if (groups.size() < 2)
    throw std::invalid_argument(
        "group_split: need at least 2 groups for a leak-free split, got " +
        std::to_string(groups.size()));

  Rng rng(seed, 0);
  rng.shuffle(groups);
  // Visit groups in the shuffled order, taking any group that keeps the test
  // fraction at or below the target; if the target is still unreached after
  // the pass, one more group must cross it (every group skipped above
  // overshoots, so the first skipped group in visit order crosses). Compare
  // realized fractions, not frame counts against fraction*total: the product
  // rounds (0.2 * 100 > 20), while 20.0/100.0 == 0.2 exactly.
  const double total = static_cast<double>(total_frames);
  std::set<std::string> test_groups;
  std::size_t test_frames = 0;
  for (const auto& g : groups) {
    const std::size_t share = frames_of[g];
    if (static_cast<double>(test_frames + share) / total <= test_fraction) {
      test_groups.insert(g);
      test_frames += share;
      if (static_cast<double>(test_frames) / total >= test_fraction) break;
    }
  }
  if (static_cast<double>(test_frames) / total < test_fraction)
    for (const auto& g : groups)
      if (!test_groups.count(g)) {
        test_groups.insert(g);
        break;
      }
  for (auto& e : m.entries)
    e.split = test_groups.count(e.group_id) ? Split::kTest : Split::kTrain;
}

}  // namespace swr::data
