#pragma once

// Shared fixtures and independent oracles for the test suites. Everything in
// here stays deliberately separate from the library implementations it
// checks (brute-force NMS, Jacobi eigensolver, exhaustive path search).

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "orchardnav/geometry.hpp"
#include "orchardnav/graph.hpp"

namespace testutil {

// Brute-force greedy NMS oracle mirroring the specified tie-break order.
inline std::vector<orchard::Detection> nms_oracle(
    std::vector<orchard::Detection> dets, double threshold) {
  std::stable_sort(dets.begin(), dets.end(), [](const auto& a, const auto& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.box.x_min != b.box.x_min) return a.box.x_min < b.box.x_min;
    if (a.box.y_min != b.box.y_min) return a.box.y_min < b.box.y_min;
    if (a.box.x_max != b.box.x_max) return a.box.x_max < b.box.x_max;
    return a.box.y_max < b.box.y_max;
  });
  std::vector<orchard::Detection> kept;
  for (const auto& d : dets) {
    bool ok = true;
    for (const auto& k : kept) {
      const double ix = std::min(d.box.x_max, k.box.x_max) -
                        std::max(d.box.x_min, k.box.x_min);
      const double iy = std::min(d.box.y_max, k.box.y_max) -
                        std::max(d.box.y_min, k.box.y_min);
      const double inter = (ix > 0 && iy > 0) ? ix * iy : 0.0;
      const double uni = d.box.area() + k.box.area() - inter;
      if (inter / uni > threshold) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(d);
  }
  return kept;
}

// Cyclic Jacobi eigensolver for symmetric 3x3 matrices; independent of the
// library's eigen route. Returns the eigenvector of the largest eigenvalue.
inline std::array<double, 3> jacobi_principal_axis(std::array<std::array<double, 3>, 3> a) {
  std::array<std::array<double, 3>, 3> v = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (int p = 0; p < 3; ++p)
      for (int q = p + 1; q < 3; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (int p = 0; p < 3; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (a[i][i] > a[best][best]) best = i;
  return {v[0][best], v[1][best], v[2][best]};
}

inline double principal_angle_oracle(const std::vector<orchard::Point3>& pts) {
  double mx = 0, my = 0, mz = 0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
    mz += p.z;
  }
  const double n = static_cast<double>(pts.size());
  mx /= n;
  my /= n;
  mz /= n;
  std::array<std::array<double, 3>, 3> cov{};
  for (const auto& p : pts) {
    const double d[3] = {p.x - mx, p.y - my, p.z - mz};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cov[i][j] += d[i] * d[j] / n;
  }
  const auto axis = jacobi_principal_axis(cov);
  const double norm =
      std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  return std::acos(std::clamp(std::abs(axis[2]) / norm, 0.0, 1.0));
}

// Exhaustive shortest simple path (branch-and-bound) between two nodes of a
// small directed graph.
inline double shortest_path_oracle(const orchard::VisibilityGraph& g, int start,
                                   int goal) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<bool> visited(g.nodes.size(), false);
  double best = inf;
  auto dfs = [&](auto&& self, int u, double len) -> void {
    if (len >= best) return;
    if (u == goal) {
      best = len;
      return;
    }
    visited[u] = true;
    for (int ei : g.out_edges(u)) {
      const auto& e = g.edges[ei];
      if (!visited[e.to]) self(self, e.to, len + e.length);
    }
    visited[u] = false;
  };
  dfs(dfs, start, 0.0);
  return best;
}

inline std::vector<orchard::Detection> random_detections(std::mt19937_64& rng,
                                                         int max_boxes) {
  std::uniform_int_distribution<int> count_dist(1, max_boxes);
  std::uniform_real_distribution<double> pos(0.0, 10.0);
  std::uniform_real_distribution<double> size(0.5, 3.0);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  std::vector<orchard::Detection> dets;
  const int n = count_dist(rng);
  for (int i = 0; i < n; ++i) {
    const double x = pos(rng), y = pos(rng);
    dets.emplace_back(orchard::Box2D(x, y, x + size(rng), y + size(rng)),
                      conf(rng));
  }
  return dets;
}

class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("orchardnav_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

}  // namespace testutil
