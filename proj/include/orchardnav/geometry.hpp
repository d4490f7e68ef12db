#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "orchardnav/errors.hpp"

namespace orchard {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  Point3() = default;
  Point3(double x_, double y_, double z_, double i_ = 0.0)
      : x(x_), y(y_), z(z_), intensity(i_) {}
};

struct Bounds3 {
  double x_min = 0, y_min = 0, z_min = 0;
  double x_max = 0, y_max = 0, z_max = 0;
};

/// Global point-cloud map. Bounds are maintained as the exact componentwise
/// min/max of the stored points; an empty map has no bounds.
class PointCloudMap {
public:
  PointCloudMap() = default;
  explicit PointCloudMap(std::vector<Point3> points);

  const std::vector<Point3>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Throws ConfigError when the map is empty.
  const Bounds3& bounds() const;

  bool has_intensity() const { return has_intensity_; }
  void set_has_intensity(bool v) { has_intensity_ = v; }

private:
  std::vector<Point3> points_;
  Bounds3 bounds_{};
  bool has_intensity_ = false;
};

/// Axis-aligned ground-plane footprint. Zero- or negative-area boxes are
/// rejected at construction.
struct Box2D {
  double x_min, y_min, x_max, y_max;

  Box2D(double x_min_, double y_min_, double x_max_, double y_max_)
      : x_min(x_min_), y_min(y_min_), x_max(x_max_), y_max(y_max_) {
    if (!(x_min < x_max) || !(y_min < y_max))
      throw ConfigError("degenerate Box2D: require x_min < x_max and y_min < y_max");
  }

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_y() const { return 0.5 * (y_min + y_max); }

  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }

  Box2D translated(double dx, double dy) const {
    return Box2D(x_min + dx, y_min + dy, x_max + dx, y_max + dy);
  }
};

struct Box3D {
  Box2D footprint;
  double z_min, z_max;

  Box3D(Box2D fp, double z_min_, double z_max_)
      : footprint(fp), z_min(z_min_), z_max(z_max_) {
    if (!(z_min < z_max))
      throw ConfigError("degenerate Box3D: require z_min < z_max");
  }

  bool contains(const Point3& p) const {
    return footprint.contains(p.x, p.y) && p.z >= z_min && p.z <= z_max;
  }
};

/// One detected object: a 2D footprint, an optional lifted z extent, a
/// confidence in [0,1] and a class id (0 = fruit tree).
struct Detection {
  Box2D box;
  std::optional<double> z_min;
  std::optional<double> z_max;
  double confidence = 0.0;
  int class_id = 0;

  Detection(Box2D b, double conf, int cls = 0)
      : box(b), confidence(conf), class_id(cls) {
    if (conf < 0.0 || conf > 1.0)
      throw ConfigError("detection confidence must be in [0,1]");
  }

  bool has_z() const { return z_min.has_value() && z_max.has_value(); }
  Box3D box3d() const {
    if (!has_z()) throw ConfigError("detection has no z extent");
    return Box3D(box, *z_min, *z_max);
  }
};

/// Intersection over union of two footprints; 0 when disjoint.
double iou_2d(const Box2D& a, const Box2D& b);

/// Greedy non-maximum suppression. Kept detections come out sorted by
/// descending confidence; a detection is suppressed when its IoU with an
/// already kept detection exceeds `iou_threshold`. Equal confidences break
/// ties toward the lexicographically lower (x_min, y_min, x_max, y_max).
std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold);

}  // namespace orchard
