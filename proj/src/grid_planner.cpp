#include "orchardnav/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace orchard {

GridPath naive_grid_plan(const PointCloudMap& map,
                         const std::vector<PointClass>& labels,
                         const PlanRequest& request, double cell) {
  if (!(cell > 0)) throw ConfigError("naive_grid_plan: cell must be > 0");
  if (labels.size() != map.size())
    throw ConfigError("naive_grid_plan: label count does not match map");
  if (map.empty()) throw ConfigError("naive_grid_plan: empty map");

  const Bounds3& b = map.bounds();
  const int nx = std::max(1, static_cast<int>(std::ceil((b.x_max - b.x_min) / cell)));
  const int ny = std::max(1, static_cast<int>(std::ceil((b.y_max - b.y_min) / cell)));

  // 0 = unobserved, 1 = free (ground only), 2 = blocked
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(nx) * ny, 0);
  const auto& pts = map.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    int cx = static_cast<int>((pts[i].x - b.x_min) / cell);
    int cy = static_cast<int>((pts[i].y - b.y_min) / cell);
    cx = std::clamp(cx, 0, nx - 1);
    cy = std::clamp(cy, 0, ny - 1);
    auto& o = occ[static_cast<std::size_t>(cy) * nx + cx];
    if (labels[i] == PointClass::Ground) {
      if (o == 0) o = 1;
    } else {
      o = 2;
    }
  }

  auto cell_of = [&](double x, double y) -> std::pair<int, int> {
    const int cx = static_cast<int>((x - b.x_min) / cell);
    const int cy = static_cast<int>((y - b.y_min) / cell);
    return {cx, cy};
  };
  auto [sx, sy] = cell_of(request.start_x, request.start_y);
  auto [gx, gy] = cell_of(request.goal_x, request.goal_y);
  auto traversable = [&](int x, int y) {
    return x >= 0 && x < nx && y >= 0 && y < ny &&
           occ[static_cast<std::size_t>(y) * nx + x] == 1;
  };
  if (!traversable(sx, sy))
    throw PlanError(PlanError::Kind::OffGraph, "start cell is blocked or unknown");
  if (!traversable(gx, gy))
    throw PlanError(PlanError::Kind::OffGraph, "goal cell is blocked or unknown");

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(nx) * ny, inf);
  std::vector<int> parent(static_cast<std::size_t>(nx) * ny, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  const int start = sy * nx + sx;
  const int goal = gy * nx + gx;
  dist[start] = 0;
  pq.emplace(0.0, start);
  const double diag = cell * std::numbers::sqrt2;
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    if (u == goal) break;
    const int ux = u % nx, uy = u / nx;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int vx = ux + dx, vy = uy + dy;
        if (!traversable(vx, vy)) continue;
        const int v = vy * nx + vx;
        const double step = (dx != 0 && dy != 0) ? diag : cell;
        if (d + step < dist[v]) {
          dist[v] = d + step;
          parent[v] = u;
          pq.emplace(dist[v], v);
        }
      }
    }
  }
  if (dist[goal] == inf)
    throw PlanError(PlanError::Kind::Unreachable, "no grid path to the goal");

  GridPath path;
  path.length = dist[goal];
  std::vector<int> cells;
  for (int v = goal; v != -1; v = parent[v]) cells.push_back(v);
  std::reverse(cells.begin(), cells.end());
  for (int c : cells) {
    const int cx = c % nx, cy = c / nx;
    path.waypoints.push_back({b.x_min + (cx + 0.5) * cell, b.y_min + (cy + 0.5) * cell});
  }
  return path;
}

}  // namespace orchard
