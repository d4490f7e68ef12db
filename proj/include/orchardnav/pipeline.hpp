#pragma once

#include <map>
#include <string>
#include <vector>

#include "orchardnav/detector.hpp"
#include "orchardnav/encoder.hpp"
#include "orchardnav/graph.hpp"
#include "orchardnav/semantic.hpp"
#include "orchardnav/terrain.hpp"
#include "orchardnav/window.hpp"

namespace orchard {

struct PipelineConfig {
  WindowSpec window;
  EncoderParams encoder;
  std::string detector = "baseline";  // baseline | external
  std::string external_dir;           // per-window JSON for detector=external
  BaselineDetectorParams baseline;
  double nms_iou = 0.5;
  CsfParams csf;
  RowParams rows;
  GraphParams graph;
  int threads = 1;

  void validate() const;
};

struct PipelineResult {
  std::vector<Detection> detections;  // merged, lifted to 3D, global frame
  GroundSegmentation segmentation;
  SemanticMap semantic;
  VisibilityGraph graph;
  std::vector<std::pair<std::string, double>> stage_seconds;
  std::vector<std::string> warnings;
};

/// Runs subdivision -> encode -> detect -> merge -> lift -> csf -> fuse ->
/// rows -> graph. When out_dir is non-empty every stage's artifact is
/// written as it completes, together with a manifest that marks incomplete
/// runs; stage failures rethrow as PipelineError naming the stage.
PipelineResult run_pipeline(const PointCloudMap& map, const PipelineConfig& config,
                            const std::string& out_dir = "");

/// Detection front half only (subdivision through lift).
std::vector<Detection> run_detection(const PointCloudMap& map,
                                     const PipelineConfig& config,
                                     std::vector<std::string>* warnings = nullptr);

}  // namespace orchard
