#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "orchardnav/encoder.hpp"
#include "orchardnav/geometry.hpp"

namespace orchard {

/// Detection backend over pillar pseudo-images. Returned boxes are in
/// window-local meters inside [0, window_size]^2 with confidences in [0,1].
/// Implementations must be safe to invoke concurrently on distinct images.
class Detector {
public:
  virtual ~Detector() = default;
  virtual std::vector<Detection> detect(const FeatureImage& img) const = 0;
};

struct BaselineDetectorParams {
  double density_floor = 0.1;  // density channel threshold, in (0,1)
  int min_cells = 3;           // minimum 8-connected component size
  double box_padding = 0.8;    // meters added around the component cell bounds

  void validate() const {
    if (!(density_floor > 0.0) || !(density_floor < 1.0))
      throw ConfigError("density_floor must lie in (0,1)");
    if (min_cells < 1) throw ConfigError("min_cells must be >= 1");
    if (box_padding < 0) throw ConfigError("box_padding must be >= 0");
  }
};

/// Connected-component detector on the density channel: cells above
/// density_floor form 8-connected components; components of at least
/// min_cells cells become detections. The box is the component's cell extent
/// plus padding, clipped to the window; confidence is the mean density over
/// the component's cells.
std::vector<Detection> baseline_detect(const FeatureImage& img,
                                       const BaselineDetectorParams& params);

class BaselineDetector : public Detector {
public:
  explicit BaselineDetector(BaselineDetectorParams params = {})
      : params_(params) {
    params_.validate();
  }
  std::vector<Detection> detect(const FeatureImage& img) const override {
    return baseline_detect(img, params_);
  }
  const BaselineDetectorParams& params() const { return params_; }

private:
  BaselineDetectorParams params_;
};

/// Escape hatch for plugging an external model: window i reads its
/// detections (window-local JSON, detections schema) from
/// `<dir>/window_<i>.json`. A missing file means no detections.
class ExternalFileDetector : public Detector {
public:
  explicit ExternalFileDetector(std::string dir) : dir_(std::move(dir)) {}
  std::vector<Detection> detect(const FeatureImage& img) const override;
  std::vector<Detection> detect_window(std::size_t window_index) const;

private:
  std::string dir_;
};

/// Lifts a 2D detection to 3D: z bounds are the exact min/max z over points
/// whose (x,y) fall inside the footprint. A single-point (or coincident-z)
/// footprint is inflated by +-0.01 m; an empty footprint is an error.
Detection lift_to_3d(const Detection& det2d, std::span<const Point3> points);

}  // namespace orchard
