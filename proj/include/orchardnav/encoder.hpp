#pragma once

#include <span>
#include <string>
#include <vector>

#include "orchardnav/geometry.hpp"
#include "orchardnav/window.hpp"

namespace orchard {

struct EncoderParams {
  int resolution = 128;     // cells per side
  int min_points = 100;     // a pillar contributes only when count > min_points
  double density_cap = 500; // count mapped to a full density channel

  void validate() const {
    if (resolution < 8) throw ConfigError("encoder resolution must be >= 8");
    if (min_points < 0) throw ConfigError("encoder min_points must be >= 0");
    if (!(density_cap > 0)) throw ConfigError("encoder density_cap must be > 0");
  }
};

struct PillarStats {
  int count = 0;
  double mean_height = 0.0;
  double principal_angle = 0.0;  // radians in [0, pi/2]
};

/// R x R x 3 pseudo-image of pillar features over a window footprint.
/// Channel order: 0 density, 1 mean height, 2 principal angle; all values
/// normalized into [0,1]. Storage is channel-major, row-major (y rows, x
/// columns) within a channel.
struct FeatureImage {
  int resolution = 0;
  double pillar_side = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  double window_size = 0.0;
  std::vector<float> data;

  static constexpr int kDensity = 0;
  static constexpr int kHeight = 1;
  static constexpr int kAngle = 2;

  float at(int channel, int ix, int iy) const {
    return data[static_cast<std::size_t>(channel) * resolution * resolution +
                static_cast<std::size_t>(iy) * resolution + ix];
  }
  float& at(int channel, int ix, int iy) {
    return data[static_cast<std::size_t>(channel) * resolution * resolution +
                static_cast<std::size_t>(iy) * resolution + ix];
  }
};

struct AngleResult {
  double radians = 0.0;
  bool degenerate = false;
};

/// Angle between the dominant covariance eigenvector of the points and the
/// z axis, folded into [0, pi/2]. Coincident (or fewer than two) points are
/// degenerate and report pi/2 with the flag set.
AngleResult principal_angle(std::span<const Point3> points);

/// Encodes points of one window into the pillar pseudo-image. Cells are
/// half-open on x and y; the final row/column closes the far edge. Cells
/// with count <= min_points stay all-zero.
FeatureImage encode_pillars(std::span<const Point3> points, double origin_x,
                            double origin_y, double window_size,
                            const EncoderParams& params);

/// Same, gathering the window's points from the global map.
FeatureImage encode_pillars(const PointCloudMap& map, const LocalWindow& window,
                            const EncoderParams& params);

/// Flat binary layout: header {R: u32, channels: u32 = 3, pillar_side: f64},
/// then channel-major row-major f32 values (native endianness). A JSON
/// sidecar `<path>.json` records the encoding parameters.
void save_feature_image(const FeatureImage& img, const std::string& path,
                        const EncoderParams& params);
FeatureImage load_feature_image(const std::string& path);

}  // namespace orchard
