#include "orchardnav/window.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace orchard {

namespace {

// Grid origins along one axis: full-stride steps from lo, plus a tail window
// clamped to end exactly at hi when the stride grid falls short.
std::vector<double> axis_origins(double lo, double hi, const WindowSpec& spec) {
  std::vector<double> origins;
  const double eps = 1e-9;
  for (double o = lo; o + spec.window_size <= hi + eps; o += spec.stride)
    origins.push_back(o);
  if (origins.empty()) {
    origins.push_back(lo);  // map smaller than one window
  } else if (origins.back() + spec.window_size < hi - eps) {
    origins.push_back(hi - spec.window_size);
  }
  return origins;
}

}  // namespace

std::vector<LocalWindow> generate_windows(const PointCloudMap& map,
                                          const WindowSpec& spec) {
  spec.validate();
  if (map.empty()) throw ConfigError("generate_windows: empty map");
  const Bounds3& b = map.bounds();

  const auto xs = axis_origins(b.x_min, b.x_max, spec);
  const auto ys = axis_origins(b.y_min, b.y_max, spec);

  std::vector<LocalWindow> windows;
  windows.reserve(xs.size() * ys.size());
  for (std::size_t j = 0; j < ys.size(); ++j) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      LocalWindow w;
      w.origin_x = xs[i];
      w.origin_y = ys[j];
      w.size = spec.window_size;
      w.closes_x_max = w.origin_x + w.size >= b.x_max;
      w.closes_y_max = w.origin_y + w.size >= b.y_max;
      windows.push_back(std::move(w));
    }
  }

  const auto& pts = map.points();
  for (std::size_t pi = 0; pi < pts.size(); ++pi) {
    for (auto& w : windows) {
      if (w.contains(pts[pi].x, pts[pi].y)) w.point_indices.push_back(pi);
    }
  }
  return windows;
}

std::vector<Detection> merge_window_detections(
    const std::vector<std::pair<const LocalWindow*, std::vector<Detection>>>&
        per_window,
    double iou_threshold) {
  std::vector<Detection> global;
  const double eps = 1e-9;
  for (const auto& [win, dets] : per_window) {
    for (const auto& d : dets) {
      if (d.box.x_min < -eps || d.box.y_min < -eps ||
          d.box.x_max > win->size + eps || d.box.y_max > win->size + eps) {
        std::ostringstream os;
        os << "detection box (" << d.box.x_min << "," << d.box.y_min << ","
           << d.box.x_max << "," << d.box.y_max
           << ") lies outside its window extent [0," << win->size << "]^2";
        throw PipelineError("merge", os.str());
      }
      Detection g(d.box.translated(win->origin_x, win->origin_y), d.confidence,
                  d.class_id);
      g.z_min = d.z_min;
      g.z_max = d.z_max;
      global.push_back(g);
    }
  }
  return nms(std::move(global), iou_threshold);
}

}  // namespace orchard
