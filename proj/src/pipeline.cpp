#include "orchardnav/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "orchardnav/cloud_io.hpp"

namespace orchard {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  window.validate();
  encoder.validate();
  baseline.validate();
  csf.validate();
  graph.validate();
  if (detector != "baseline" && detector != "external")
    throw ConfigError("detector must be 'baseline' or 'external'");
  if (detector == "external" && external_dir.empty())
    throw ConfigError("detector=external requires external_dir");
  if (!(nms_iou > 0.0) || !(nms_iou < 1.0))
    throw ConfigError("nms_iou must lie in (0,1)");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

namespace {

class Manifest {
public:
  Manifest(std::string out_dir) : out_dir_(std::move(out_dir)) {
    if (out_dir_.empty()) return;
    fs::create_directories(out_dir_);
    write();
  }

  void stage_done(const std::string& stage, const std::string& artifact) {
    if (out_dir_.empty()) return;
    stages_.emplace_back(stage, artifact);
    write();
  }

  void fail(const std::string& stage, const std::string& error) {
    if (out_dir_.empty()) return;
    failed_stage_ = stage;
    error_ = error;
    write();
  }

  void complete() {
    if (out_dir_.empty()) return;
    complete_ = true;
    write();
  }

private:
  void write() const {
    json j;
    j["complete"] = complete_;
    json stages = json::array();
    for (const auto& [stage, artifact] : stages_) {
      json s;
      s["stage"] = stage;
      s["artifact"] = artifact;
      stages.push_back(s);
    }
    j["stages"] = stages;
    if (!failed_stage_.empty()) {
      j["failed_stage"] = failed_stage_;
      j["error"] = error_;
    }
    std::ofstream out(fs::path(out_dir_) / "manifest.json");
    out << j.dump(2) << "\n";
  }

  std::string out_dir_;
  std::vector<std::pair<std::string, std::string>> stages_;
  std::string failed_stage_;
  std::string error_;
  bool complete_ = false;
};

std::vector<std::vector<Detection>> detect_windows(
    const PointCloudMap& map, const std::vector<LocalWindow>& windows,
    const PipelineConfig& config) {
  std::vector<std::vector<Detection>> results(windows.size());
  if (config.detector == "external") {
    ExternalFileDetector det(config.external_dir);
    for (std::size_t i = 0; i < windows.size(); ++i)
      results[i] = det.detect_window(i);
    return results;
  }

  BaselineDetector det(config.baseline);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const FeatureImage img = encode_pillars(map, windows[i], config.encoder);
      results[i] = det.detect(img);
    }
  };
  const std::size_t n_threads =
      std::min<std::size_t>(config.threads, std::max<std::size_t>(windows.size(), 1));
  if (n_threads <= 1) {
    work(0, windows.size());
  } else {
    // Results land by window index, so completion order never matters.
    std::vector<std::future<void>> futures;
    const std::size_t chunk = (windows.size() + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(windows.size(), begin + chunk);
      if (begin >= end) break;
      futures.push_back(std::async(std::launch::async, work, begin, end));
    }
    for (auto& f : futures) f.get();
  }
  return results;
}

}  // namespace

std::vector<Detection> run_detection(const PointCloudMap& map,
                                     const PipelineConfig& config,
                                     std::vector<std::string>* warnings) {
  const auto windows = generate_windows(map, config.window);
  const auto per_window_dets = detect_windows(map, windows, config);
  std::vector<std::pair<const LocalWindow*, std::vector<Detection>>> pairs;
  pairs.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i)
    pairs.emplace_back(&windows[i], per_window_dets[i]);
  auto merged = merge_window_detections(pairs, config.nms_iou);

  std::vector<Detection> lifted;
  lifted.reserve(merged.size());
  for (const auto& det : merged) {
    try {
      lifted.push_back(lift_to_3d(det, map.points()));
    } catch (const PipelineError&) {
      if (warnings) {
        std::ostringstream os;
        os << "dropped detection with empty footprint at (" << det.box.x_min
           << "," << det.box.y_min << ")";
        warnings->push_back(os.str());
      }
    }
  }
  return lifted;
}

PipelineResult run_pipeline(const PointCloudMap& map, const PipelineConfig& config,
                            const std::string& out_dir) {
  using clock = std::chrono::steady_clock;
  config.validate();
  if (map.empty()) throw PipelineError("subdivision", "empty input map");

  Manifest manifest(out_dir);
  PipelineResult result;
  std::string stage = "subdivision";
  const auto artifact_path = [&](const char* name) {
    return (fs::path(out_dir) / name).string();
  };

  try {
    auto t0 = clock::now();
    stage = "detect";
    result.detections = run_detection(map, config, &result.warnings);
    auto t1 = clock::now();
    result.stage_seconds.emplace_back(
        "detect", std::chrono::duration<double>(t1 - t0).count());
    if (!out_dir.empty()) {
      save_detections(result.detections, artifact_path("detections.json"));
      manifest.stage_done("detect", "detections.json");
    }

    stage = "terrain";
    t0 = clock::now();
    result.segmentation = csf_segment(map, config.csf);
    t1 = clock::now();
    result.stage_seconds.emplace_back(
        "terrain", std::chrono::duration<double>(t1 - t0).count());
    if (!result.segmentation.settled) {
      std::ostringstream os;
      os << "cloth did not settle, residual " << result.segmentation.residual
         << " m";
      result.warnings.push_back(os.str());
    }
    if (!out_dir.empty()) {
      json seg;
      seg["ground"] = result.segmentation.ground_indices;
      seg["nonground"] = result.segmentation.nonground_indices;
      seg["settled"] = result.segmentation.settled;
      seg["residual"] = result.segmentation.residual;
      std::ofstream out(artifact_path("segmentation.json"));
      out << seg.dump() << "\n";
      manifest.stage_done("terrain", "segmentation.json");
    }

    stage = "fuse";
    t0 = clock::now();
    result.semantic.trees = result.detections;
    result.semantic.labels =
        fuse_labels(map, result.detections, result.segmentation);
    t1 = clock::now();
    result.stage_seconds.emplace_back(
        "fuse", std::chrono::duration<double>(t1 - t0).count());

    stage = "rows";
    t0 = clock::now();
    result.semantic.rows = detect_tree_rows(result.detections, config.rows);
    std::set<std::size_t> assigned;
    for (const auto& row : result.semantic.rows)
      assigned.insert(row.member_trees.begin(), row.member_trees.end());
    for (std::size_t t = 0; t < result.detections.size(); ++t)
      if (!assigned.count(t)) result.semantic.unassigned_trees.push_back(t);
    t1 = clock::now();
    result.stage_seconds.emplace_back(
        "rows", std::chrono::duration<double>(t1 - t0).count());
    if (!out_dir.empty()) {
      save_semantic_map(result.semantic, artifact_path("semantic.json"));
      save_labeled_cloud(map, result.semantic.labels, artifact_path("labeled.xyz"));
      manifest.stage_done("rows", "semantic.json");
    }

    stage = "graph";
    t0 = clock::now();
    result.graph = build_graph(result.semantic.rows, result.detections, config.graph);
    t1 = clock::now();
    result.stage_seconds.emplace_back(
        "graph", std::chrono::duration<double>(t1 - t0).count());
    for (const auto& w : result.graph.warnings) result.warnings.push_back(w);
    if (!out_dir.empty()) {
      save_graph(result.graph, artifact_path("graph.json"));
      manifest.stage_done("graph", "graph.json");
      manifest.complete();
    }
  } catch (const PipelineError& e) {
    manifest.fail(e.stage(), e.what());
    throw;
  } catch (const std::exception& e) {
    manifest.fail(stage, e.what());
    throw PipelineError(stage, e.what());
  }
  return result;
}

}  // namespace orchard
