#include "orchardnav/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orchard {

double ClothState::interpolate(double x, double y) const {
  const double fx = (x - origin_x) / resolution;
  const double fy = (y - origin_y) / resolution;
  int i0 = static_cast<int>(std::floor(fx));
  int j0 = static_cast<int>(std::floor(fy));
  i0 = std::clamp(i0, 0, nx - 2);
  j0 = std::clamp(j0, 0, ny - 2);
  const double tx = std::clamp(fx - i0, 0.0, 1.0);
  const double ty = std::clamp(fy - j0, 0.0, 1.0);
  const double h00 = height_at(i0, j0);
  const double h10 = height_at(i0 + 1, j0);
  const double h01 = height_at(i0, j0 + 1);
  const double h11 = height_at(i0 + 1, j0 + 1);
  return (1 - tx) * (1 - ty) * h00 + tx * (1 - ty) * h10 +
         (1 - tx) * ty * h01 + tx * ty * h11;
}

namespace {

// Fills cells without any points by repeated averaging over already-filled
// 8-neighborhoods, wave by wave.
void fill_empty_cells(std::vector<double>& heights, std::vector<bool>& filled,
                      int nx, int ny) {
  bool remaining = true;
  while (remaining) {
    remaining = false;
    std::vector<std::pair<int, double>> updates;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const int c = j * nx + i;
        if (filled[c]) continue;
        double sum = 0.0;
        int n = 0;
        for (int dj = -1; dj <= 1; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            if (di == 0 && dj == 0) continue;
            const int ni = i + di, nj = j + dj;
            if (ni < 0 || ni >= nx || nj < 0 || nj >= ny) continue;
            if (!filled[nj * nx + ni]) continue;
            sum += heights[nj * nx + ni];
            ++n;
          }
        }
        if (n > 0) updates.emplace_back(c, sum / n);
        else remaining = true;
      }
    }
    for (const auto& [c, h] : updates) {
      heights[c] = h;
      filled[c] = true;
    }
    if (updates.empty() && remaining) break;  // fully empty grid, nothing to do
  }
}

}  // namespace

GroundSegmentation csf_segment(const PointCloudMap& map, const CsfParams& params,
                               ClothState* cloth_out) {
  params.validate();
  if (map.empty()) throw ConfigError("csf_segment: empty map");

  const Bounds3& b = map.bounds();
  const double res = params.cloth_resolution;

  ClothState cloth;
  cloth.resolution = res;
  cloth.origin_x = b.x_min - res;
  cloth.origin_y = b.y_min - res;
  cloth.nx = static_cast<int>(std::ceil((b.x_max - b.x_min) / res)) + 3;
  cloth.ny = static_cast<int>(std::ceil((b.y_max - b.y_min) / res)) + 3;
  const int nx = cloth.nx, ny = cloth.ny;
  const std::size_t n_cells = static_cast<std::size_t>(nx) * ny;

  // Inverted-frame surface: per particle cell, the highest inverted point
  // (nearest-neighbor assignment).
  std::vector<double> collision(n_cells, -std::numeric_limits<double>::infinity());
  std::vector<bool> filled(n_cells, false);
  for (const auto& p : map.points()) {
    const int i = static_cast<int>(std::lround((p.x - cloth.origin_x) / res));
    const int j = static_cast<int>(std::lround((p.y - cloth.origin_y) / res));
    if (i < 0 || i >= nx || j < 0 || j >= ny) continue;
    const std::size_t c = static_cast<std::size_t>(j) * nx + i;
    collision[c] = std::max(collision[c], -p.z);
    filled[c] = true;
  }
  fill_empty_cells(collision, filled, nx, ny);

  const double top = -b.z_min;  // highest inverted z
  std::vector<double> z(n_cells, top + 2.0 * res + 1.0);
  std::vector<double> z_prev(z);
  std::vector<bool> movable(n_cells, true);
  std::size_t movable_count = n_cells;

  const double g_step = params.gravity * params.time_step * params.time_step;
  const double keep = 1.0 - params.damping;

  double residual = 0.0;
  for (int iter = 0; iter < params.iterations && movable_count > 0; ++iter) {
    std::vector<double> z_start(z);

    // Gravity displacement via position-based integration.
    for (std::size_t c = 0; c < n_cells; ++c) {
      if (!movable[c]) continue;
      const double cur = z[c];
      z[c] = cur + (cur - z_prev[c]) * keep - g_step;
      z_prev[c] = cur;
    }
    // Collision: pin on contact with the inverted surface.
    for (std::size_t c = 0; c < n_cells; ++c) {
      if (!movable[c]) continue;
      if (z[c] <= collision[c]) {
        z[c] = collision[c];
        z_prev[c] = collision[c];
        movable[c] = false;
        --movable_count;
      }
    }
    // Spring relaxation over structural (4-connected) links, row-major
    // sweeps so results are reproducible. Each pass halves the height
    // difference of a link.
    for (int pass = 0; pass < params.rigidness; ++pass) {
      for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
          const std::size_t a = static_cast<std::size_t>(j) * nx + i;
          for (int dir = 0; dir < 2; ++dir) {
            const int ni = dir == 0 ? i + 1 : i;
            const int nj = dir == 0 ? j : j + 1;
            if (ni >= nx || nj >= ny) continue;
            const std::size_t bidx = static_cast<std::size_t>(nj) * nx + ni;
            const double d = z[bidx] - z[a];
            if (movable[a] && movable[bidx]) {
              z[a] += d * 0.25;
              z[bidx] -= d * 0.25;
            } else if (movable[a]) {
              z[a] += d * 0.5;
            } else if (movable[bidx]) {
              z[bidx] -= d * 0.5;
            }
          }
        }
      }
    }

    residual = 0.0;
    for (std::size_t c = 0; c < n_cells; ++c)
      residual = std::max(residual, std::abs(z[c] - z_start[c]));
  }

  // Terminal collision pass: relaxation may leave a movable particle just
  // below the surface it would have pinned to next iteration.
  for (std::size_t c = 0; c < n_cells; ++c)
    if (movable[c] && z[c] < collision[c]) z[c] = collision[c];

  cloth.heights = std::move(z);
  cloth.collision_heights = std::move(collision);
  cloth.pinned.resize(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) cloth.pinned[c] = !movable[c];

  GroundSegmentation seg;
  seg.residual = residual;
  seg.settled = residual <= 1e-4;
  const auto& pts = map.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double cloth_z = cloth.interpolate(pts[i].x, pts[i].y);
    const double dist = std::abs(cloth_z - (-pts[i].z));
    if (dist <= params.class_threshold) seg.ground_indices.push_back(i);
    else seg.nonground_indices.push_back(i);
  }
  if (cloth_out) *cloth_out = std::move(cloth);
  return seg;
}

std::pair<double, double> compute_ser_sar(const GroundSegmentation& pred,
                                          const std::vector<std::size_t>& truth,
                                          std::size_t cloud_size) {
  if (truth.empty()) throw ConfigError("compute_ser_sar: empty truth set");
  std::vector<bool> is_truth(cloud_size, false);
  for (std::size_t i : truth) {
    if (i >= cloud_size) throw ConfigError("compute_ser_sar: truth index out of range");
    is_truth[i] = true;
  }
  std::size_t hit = 0, spill = 0;
  for (std::size_t i : pred.ground_indices) {
    if (i < cloud_size && is_truth[i]) ++hit;
    else ++spill;
  }
  const double denom = static_cast<double>(truth.size());
  return {static_cast<double>(spill) / denom, static_cast<double>(hit) / denom};
}

}  // namespace orchard
