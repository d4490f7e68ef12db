#include "orchardnav/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace orchard {

PointCloudMap::PointCloudMap(std::vector<Point3> points)
    : points_(std::move(points)) {
  if (points_.empty()) return;
  bounds_.x_min = bounds_.x_max = points_[0].x;
  bounds_.y_min = bounds_.y_max = points_[0].y;
  bounds_.z_min = bounds_.z_max = points_[0].z;
  for (const auto& p : points_) {
    bounds_.x_min = std::min(bounds_.x_min, p.x);
    bounds_.x_max = std::max(bounds_.x_max, p.x);
    bounds_.y_min = std::min(bounds_.y_min, p.y);
    bounds_.y_max = std::max(bounds_.y_max, p.y);
    bounds_.z_min = std::min(bounds_.z_min, p.z);
    bounds_.z_max = std::max(bounds_.z_max, p.z);
  }
}

const Bounds3& PointCloudMap::bounds() const {
  if (points_.empty()) throw ConfigError("bounds of an empty map are undefined");
  return bounds_;
}

double iou_2d(const Box2D& a, const Box2D& b) {
  const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return inter / uni;
}

namespace {
bool nms_order(const Detection& a, const Detection& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.box.x_min != b.box.x_min) return a.box.x_min < b.box.x_min;
  if (a.box.y_min != b.box.y_min) return a.box.y_min < b.box.y_min;
  if (a.box.x_max != b.box.x_max) return a.box.x_max < b.box.x_max;
  return a.box.y_max < b.box.y_max;
}
}  // namespace

std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold) {
  if (iou_threshold <= 0.0 || iou_threshold >= 1.0)
    throw ConfigError("nms iou_threshold must lie in (0,1)");
  std::stable_sort(dets.begin(), dets.end(), nms_order);
  std::vector<Detection> kept;
  kept.reserve(dets.size());
  for (const auto& d : dets) {
    bool suppressed = false;
    for (const auto& k : kept) {
      if (iou_2d(d.box, k.box) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

}  // namespace orchard
