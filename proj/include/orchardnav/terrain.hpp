#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "orchardnav/geometry.hpp"

namespace orchard {

struct CsfParams {
  double cloth_resolution = 0.1;  // particle grid spacing, meters
  double class_threshold = 0.1;   // point-to-cloth distance for ground, meters
  int iterations = 500;
  int rigidness = 3;       // constraint relaxation passes per iteration, 1..3
  double time_step = 0.65; // seconds
  double gravity = 9.8;    // m/s^2, downward in the inverted frame
  double damping = 0.01;   // velocity loss per step of the position-based update

  void validate() const {
    if (!(cloth_resolution > 0)) throw ConfigError("cloth_resolution must be > 0");
    if (!(class_threshold > 0)) throw ConfigError("class_threshold must be > 0");
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (rigidness < 1 || rigidness > 3) throw ConfigError("rigidness must be 1..3");
    if (!(time_step > 0)) throw ConfigError("time_step must be > 0");
  }
};

struct GroundSegmentation {
  std::vector<std::size_t> ground_indices;
  std::vector<std::size_t> nonground_indices;
  bool settled = true;
  double residual = 0.0;  // max particle displacement in the final iteration
};

/// Settled cloth state, exposed for inspection and tests.
struct ClothState {
  double origin_x = 0.0, origin_y = 0.0;
  double resolution = 0.0;
  int nx = 0, ny = 0;
  std::vector<double> heights;           // inverted-frame z per particle
  std::vector<double> collision_heights; // per-cell surface the cloth rests on
  std::vector<bool> pinned;

  double height_at(int i, int j) const { return heights[j * nx + i]; }
  /// Bilinear cloth height at an (x,y) inside the lattice.
  double interpolate(double x, double y) const;
};

/// Cloth-simulation ground filter: the cloud is inverted, a particle cloth
/// is dropped onto it under gravity with spring relaxation between lattice
/// neighbors, and points within class_threshold of the settled cloth are
/// ground. If `cloth_out` is non-null, the settled cloth is copied there.
GroundSegmentation csf_segment(const PointCloudMap& map, const CsfParams& params,
                               ClothState* cloth_out = nullptr);

/// sar = |pred_ground n truth| / |truth|, the fraction of true ground found;
/// ser = |pred_ground \ truth| / |truth|, spill of non-ground into the
/// predicted ground set. Empty truth is an error.
std::pair<double, double> compute_ser_sar(const GroundSegmentation& pred,
                                          const std::vector<std::size_t>& truth,
                                          std::size_t cloud_size);

}  // namespace orchard
