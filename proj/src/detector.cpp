#include "orchardnav/detector.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "orchardnav/cloud_io.hpp"

namespace orchard {

std::vector<Detection> baseline_detect(const FeatureImage& img,
                                       const BaselineDetectorParams& params) {
  params.validate();
  const int R = img.resolution;
  const double ps = img.pillar_side;

  std::vector<int> label(static_cast<std::size_t>(R) * R, -1);
  auto over = [&](int ix, int iy) {
    return img.at(FeatureImage::kDensity, ix, iy) >= params.density_floor;
  };

  struct Component {
    int x0, y0, x1, y1;  // inclusive cell bounds
    int cells = 0;
    double density_sum = 0.0;
  };
  std::vector<Component> comps;
  std::vector<std::pair<int, int>> stack;

  for (int iy = 0; iy < R; ++iy) {
    for (int ix = 0; ix < R; ++ix) {
      if (!over(ix, iy) || label[iy * R + ix] >= 0) continue;
      const int id = static_cast<int>(comps.size());
      comps.push_back({ix, iy, ix, iy});
      stack.clear();
      stack.emplace_back(ix, iy);
      label[iy * R + ix] = id;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        Component& comp = comps[id];
        comp.x0 = std::min(comp.x0, cx);
        comp.y0 = std::min(comp.y0, cy);
        comp.x1 = std::max(comp.x1, cx);
        comp.y1 = std::max(comp.y1, cy);
        comp.cells += 1;
        comp.density_sum += img.at(FeatureImage::kDensity, cx, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || nx >= R || ny < 0 || ny >= R) continue;
            if (!over(nx, ny) || label[ny * R + nx] >= 0) continue;
            label[ny * R + nx] = id;
            stack.emplace_back(nx, ny);
          }
        }
      }
    }
  }

  std::vector<Detection> dets;
  for (const auto& c : comps) {
    if (c.cells < params.min_cells) continue;
    double x_min = c.x0 * ps - params.box_padding;
    double y_min = c.y0 * ps - params.box_padding;
    double x_max = (c.x1 + 1) * ps + params.box_padding;
    double y_max = (c.y1 + 1) * ps + params.box_padding;
    x_min = std::max(x_min, 0.0);
    y_min = std::max(y_min, 0.0);
    x_max = std::min(x_max, img.window_size);
    y_max = std::min(y_max, img.window_size);
    if (!(x_min < x_max) || !(y_min < y_max)) continue;
    const double confidence = std::min(c.density_sum / c.cells, 1.0);
    dets.emplace_back(Box2D(x_min, y_min, x_max, y_max), confidence, 0);
  }
  return dets;
}

std::vector<Detection> ExternalFileDetector::detect(const FeatureImage&) const {
  throw ConfigError(
      "ExternalFileDetector is indexed per window; use detect_window()");
}

std::vector<Detection> ExternalFileDetector::detect_window(
    std::size_t window_index) const {
  const std::filesystem::path file =
      std::filesystem::path(dir_) / ("window_" + std::to_string(window_index) + ".json");
  if (!std::filesystem::exists(file)) return {};
  return load_detections(file.string());
}

Detection lift_to_3d(const Detection& det2d, std::span<const Point3> points) {
  double z_lo = std::numeric_limits<double>::infinity();
  double z_hi = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& p : points) {
    if (!det2d.box.contains(p.x, p.y)) continue;
    z_lo = std::min(z_lo, p.z);
    z_hi = std::max(z_hi, p.z);
    any = true;
  }
  if (!any)
    throw PipelineError("lift", "no points inside detection footprint");
  if (z_lo == z_hi) {
    // Single point or coincident heights: inflate so the box stays valid.
    constexpr double kEps = 0.01;
    z_lo -= kEps;
    z_hi += kEps;
  }
  Detection out = det2d;
  out.z_min = z_lo;
  out.z_max = z_hi;
  return out;
}

}  // namespace orchard
