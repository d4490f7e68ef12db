#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orchardnav/geometry.hpp"
#include "orchardnav/terrain.hpp"

namespace orchard {

enum class PointClass : std::uint8_t { Tree = 0, Ground = 1, Obstacle = 2 };

/// A collinear run of trees: the fitted ground-plane line in normal form
/// (rho = x cos(theta) + y sin(theta)), member tree indices ordered along
/// the line, and the projected positions of the first and last members.
struct TreeRow {
  double theta = 0.0;  // radians in [0, pi)
  double rho = 0.0;    // meters
  std::vector<std::size_t> member_trees;
  double end_x0 = 0, end_y0 = 0;
  double end_x1 = 0, end_y1 = 0;
};

struct SemanticMap {
  std::vector<PointClass> labels;   // one per map point
  std::vector<Detection> trees;     // lifted 3D detections
  std::vector<TreeRow> rows;
  std::vector<std::size_t> unassigned_trees;  // trees in no row
};

/// Per-point class fusion: inside any tree box -> Tree (tree wins over
/// ground), else in the ground set -> Ground, else Obstacle.
std::vector<PointClass> fuse_labels(const PointCloudMap& map,
                                    const std::vector<Detection>& trees,
                                    const GroundSegmentation& ground);

struct RowParams {
  double lateral_tolerance = 0.5;  // meters
  int min_trees_per_row = 3;
};

/// Iterative Hough line detection over tree footprint centers: accumulate
/// into a (theta, rho) grid, take the peak, claim all centers within the
/// lateral tolerance, refine the line by total least squares over the
/// claimed set, remove them, and repeat until no peak reaches
/// min_trees_per_row. Each tree joins at most one row.
std::vector<TreeRow> detect_tree_rows(const std::vector<Detection>& trees,
                                      const RowParams& params);

/// Labeled-cloud export: "x y z label" per line.
void save_labeled_cloud(const PointCloudMap& map,
                        const std::vector<PointClass>& labels,
                        const std::string& path);

std::string semantic_map_to_json(const SemanticMap& semantic);
void save_semantic_map(const SemanticMap& semantic, const std::string& path);
SemanticMap load_semantic_map(const std::string& path);

}  // namespace orchard
