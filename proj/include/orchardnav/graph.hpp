#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orchardnav/geometry.hpp"
#include "orchardnav/semantic.hpp"

namespace orchard {

enum class NodeKind : std::uint8_t { TreeAccess = 0, RowEnd = 1, UTurn = 2 };
enum class RowSide : std::uint8_t { Left = 0, Right = 1 };
enum class EdgeKind : std::uint8_t { Lane = 0, Turn = 1 };

struct AccessNode {
  int id = -1;
  double x = 0, y = 0;
  double heading = 0;  // required travel direction through the node, radians
  NodeKind kind = NodeKind::TreeAccess;
  int tree_ref = -1;      // global tree index for tree_access nodes
  int row_ref = -1;       // row the node's lane belongs to
  int corridor_ref = -1;  // owning corridor / loop unit
  RowSide side = RowSide::Left;
};

/// Directed edge. Travel is permitted only from `from` to `to`; `heading` is
/// the travel direction on completing the edge (for turn edges made in the
/// open end areas this is the heading of the destination lane).
struct CorridorEdge {
  int from = -1;
  int to = -1;
  double length = 0;
  EdgeKind kind = EdgeKind::Lane;
  double heading = 0;
  int corridor_ref = -1;  // -1 for cross-corridor switch edges
};

struct CorridorInfo {
  int row_a = -1;  // lower sorted row; single-row loops set row_b = -1
  int row_b = -1;
  double dir_x = 1, dir_y = 0;  // corridor axis (unit)
  double t_min = 0, t_max = 0;  // extent along the axis, trees only
  double width = 0;             // free width between canopies, 0 if single row
};

struct GraphParams {
  double lane_offset = 0.0;        // m from the row line; 0 = auto (quarter split)
  double end_extension = 2.0;      // m beyond the first/last tree
  double heading_tolerance = 15.0 * 3.14159265358979323846 / 180.0;  // rad
  double clearance_min = 0.3;      // m; corridors narrower than twice this drop
  double snap_radius = 2.0;        // m, pose-to-node snapping

  void validate() const {
    if (lane_offset < 0) throw ConfigError("lane_offset must be >= 0");
    if (!(end_extension > 0)) throw ConfigError("end_extension must be > 0");
    if (!(heading_tolerance > 0)) throw ConfigError("heading_tolerance must be > 0");
    if (!(snap_radius > 0)) throw ConfigError("snap_radius must be > 0");
  }
};

struct VisibilityGraph {
  std::vector<AccessNode> nodes;
  std::vector<CorridorEdge> edges;
  std::vector<CorridorInfo> corridors;
  GraphParams params;
  std::vector<std::string> warnings;

  const std::vector<int>& out_edges(int node) const { return adjacency_[node]; }
  void rebuild_adjacency();

private:
  std::vector<std::vector<int>> adjacency_;
};

struct PlanRequest {
  double start_x = 0, start_y = 0, start_heading = 0;
  double goal_x = 0, goal_y = 0, goal_heading = 0;
};

struct Path {
  std::vector<int> node_ids;
  double length = 0;
  std::vector<double> segment_headings;  // one per traversed edge
};

/// Builds the directed navigation graph from detected rows: one lane on each
/// side of every corridor between adjacent rows (antiparallel, so each
/// corridor is a one-way loop closed through the end extension areas), a
/// tree access node per tree on every lane facing it, and end nodes placed
/// end_extension beyond the outermost trees where U-turns and corridor
/// switches are permitted. A single row gets lanes on both of its sides.
VisibilityGraph build_graph(const std::vector<TreeRow>& rows,
                            const std::vector<Detection>& trees,
                            const GraphParams& params);

/// Manual variant: rows given directly as ordered tree center lists (used
/// where row detection is bypassed and node positions are laid out by hand).
VisibilityGraph build_graph_from_centers(
    const std::vector<std::vector<std::array<double, 2>>>& rows_of_centers,
    const GraphParams& params);

/// Minimum-length directed path between the snapped start and goal nodes.
/// Poses snap to the nearest node within snap_radius whose heading matches
/// within heading_tolerance; failing that is an off-graph error, and a goal
/// with no directed route is unreachable.
Path plan_path(const VisibilityGraph& graph, const PlanRequest& request);

std::string graph_to_json(const VisibilityGraph& graph);
VisibilityGraph graph_from_json(const std::string& text);
void save_graph(const VisibilityGraph& graph, const std::string& path);
VisibilityGraph load_graph(const std::string& path);

/// Path polyline export for external viewers: "x y heading" rows.
void save_path(const VisibilityGraph& graph, const Path& path,
               const std::string& json_path);

// --- grid baseline (timing comparison stand-in) ---

struct GridPath {
  std::vector<std::array<double, 2>> waypoints;
  double length = 0;
};

/// Heading-free shortest path over an occupancy grid rasterized from the
/// semantic labels: cells holding any Tree or Obstacle point are blocked,
/// cells with only Ground points are free, unobserved cells are blocked.
GridPath naive_grid_plan(const PointCloudMap& map,
                         const std::vector<PointClass>& labels,
                         const PlanRequest& request, double cell);

}  // namespace orchard
