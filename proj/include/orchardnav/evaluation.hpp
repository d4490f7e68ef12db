#pragma once

#include <string>
#include <vector>

#include "orchardnav/detector.hpp"
#include "orchardnav/encoder.hpp"
#include "orchardnav/geometry.hpp"
#include "orchardnav/window.hpp"

namespace orchard {

struct DetectionEvalResult {
  double miou = 0.0;
  bool miou_defined = false;  // false when there are no matches at all
  double map50 = 0.0;         // 11-point interpolated AP at the match threshold
  struct Match {
    int pred;
    int truth;
    double iou;
  };
  std::vector<Match> matches;
};

/// Greedy matching in descending prediction confidence: each prediction
/// takes the unmatched truth with the highest IoU at or above the threshold.
/// miou averages the matched IoUs; map50 is the 11-point interpolated
/// average precision of the induced PR curve.
DetectionEvalResult eval_detections(const std::vector<Detection>& preds,
                                    const std::vector<Box2D>& truths,
                                    double iou_threshold);

struct StudyOptions {
  std::vector<double> window_sizes = {5.0, 10.0, 20.0};
  std::vector<int> resolutions = {64, 128, 256};
  double overlap = 2.0;  // stride = window size - overlap
  int timing_runs = 5;
  double nms_iou = 0.5;
  double eval_iou = 0.5;
  EncoderParams encoder;  // resolution is overridden per cell
  BaselineDetectorParams detector;
};

struct StudyCell {
  double window_size = 0;
  int resolution = 0;
  int n_windows = 0;
  double feature_time_window_s = 0;  // median per-window encode time
  double feature_time_total_s = 0;   // median whole-map encode time
  double predict_time_window_s = 0;
  double predict_time_total_s = 0;
  double miou = 0;
  bool miou_defined = false;
  int detections = 0;
};

/// Full size x resolution sweep of the encode+detect pipeline against truth
/// boxes; every timing is the median of `timing_runs` serialized runs.
std::vector<StudyCell> run_subdivision_study(const PointCloudMap& map,
                                             const std::vector<Box2D>& truths,
                                             const StudyOptions& options);

std::string study_to_csv(const std::vector<StudyCell>& cells);
std::string study_to_json(const std::vector<StudyCell>& cells);

}  // namespace orchard
