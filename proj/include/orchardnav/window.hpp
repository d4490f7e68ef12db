#pragma once

#include <cstddef>
#include <vector>

#include "orchardnav/geometry.hpp"

namespace orchard {

struct WindowSpec {
  double window_size = 10.0;  // square side, meters
  double stride = 8.0;        // meters

  double overlap() const { return window_size - stride; }
  void validate() const {
    if (!(stride > 0.0) || !(stride <= window_size))
      throw ConfigError("WindowSpec: require 0 < stride <= window_size");
  }
};

/// One local window over the global map. Points are held as indices into the
/// global map, never copied. Interior windows are half-open on x and y;
/// windows on the map's far edge close that edge so no point is lost.
struct LocalWindow {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double size = 0.0;
  bool closes_x_max = false;
  bool closes_y_max = false;
  std::vector<std::size_t> point_indices;

  bool contains(double x, double y) const {
    const bool in_x =
        x >= origin_x && (closes_x_max ? x <= origin_x + size : x < origin_x + size);
    const bool in_y =
        y >= origin_y && (closes_y_max ? y <= origin_y + size : y < origin_y + size);
    return in_x && in_y;
  }
};

/// Cuts the map into a row-major grid of overlapping windows. Origins step
/// by the stride from the map min; when the grid would fall short of the map
/// max, one extra window is clamped to end exactly at the map max so the
/// union of windows covers the whole footprint.
std::vector<LocalWindow> generate_windows(const PointCloudMap& map,
                                          const WindowSpec& spec);

/// Translates per-window detections into global coordinates and runs one
/// global NMS pass to drop cross-window duplicates. Detections must lie
/// within their window's extent.
std::vector<Detection> merge_window_detections(
    const std::vector<std::pair<const LocalWindow*, std::vector<Detection>>>&
        per_window,
    double iou_threshold);

}  // namespace orchard
