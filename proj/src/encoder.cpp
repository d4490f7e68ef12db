#include "orchardnav/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace orchard {

AngleResult principal_angle(std::span<const Point3> points) {
  if (points.size() < 2) return {std::numbers::pi / 2.0, true};

  double mx = 0, my = 0, mz = 0;
  for (const auto& p : points) {
    mx += p.x;
    my += p.y;
    mz += p.z;
  }
  const double n = static_cast<double>(points.size());
  mx /= n;
  my /= n;
  mz /= n;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const double dx = p.x - mx, dy = p.y - my, dz = p.z - mz;
    cov(0, 0) += dx * dx;
    cov(0, 1) += dx * dy;
    cov(0, 2) += dx * dz;
    cov(1, 1) += dy * dy;
    cov(1, 2) += dy * dz;
    cov(2, 2) += dz * dz;
  }
  cov(1, 0) = cov(0, 1);
  cov(2, 0) = cov(0, 2);
  cov(2, 1) = cov(1, 2);
  cov /= n;

  if (!(cov.trace() > 0.0) || !std::isfinite(cov.trace()))
    return {std::numbers::pi / 2.0, true};

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success) return {std::numbers::pi / 2.0, true};
  // Eigenvalues come out ascending; the principal vector is the last column.
  Eigen::Vector3d v = solver.eigenvectors().col(2);
  const double cosang = std::clamp(std::abs(v.z()) / v.norm(), 0.0, 1.0);
  return {std::acos(cosang), false};
}

FeatureImage encode_pillars(std::span<const Point3> points, double origin_x,
                            double origin_y, double window_size,
                            const EncoderParams& params) {
  params.validate();
  const int R = params.resolution;
  const std::size_t cells = static_cast<std::size_t>(R) * R;

  FeatureImage img;
  img.resolution = R;
  img.pillar_side = window_size / R;
  img.origin_x = origin_x;
  img.origin_y = origin_y;
  img.window_size = window_size;
  img.data.assign(3 * cells, 0.0f);
  if (points.empty()) return img;

  const double ps = img.pillar_side;
  auto cell_of = [&](double v, double origin) -> int {
    const int c = static_cast<int>(std::floor((v - origin) / ps));
    if (c == R) return R - 1;  // far edge closes the final row/column
    return c;
  };

  // Counting sort of point indices by cell, preserving input order within a
  // cell so per-cell reductions are bit-identical regardless of callers.
  std::vector<int> cell_idx(points.size(), -1);
  std::vector<std::uint32_t> counts(cells, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int cx = cell_of(points[i].x, origin_x);
    const int cy = cell_of(points[i].y, origin_y);
    if (cx < 0 || cx >= R || cy < 0 || cy >= R) continue;
    const int c = cy * R + cx;
    cell_idx[i] = c;
    ++counts[c];
  }
  std::vector<std::uint32_t> offsets(cells + 1, 0);
  for (std::size_t c = 0; c < cells; ++c) offsets[c + 1] = offsets[c] + counts[c];
  std::vector<std::uint32_t> order(offsets.back());
  {
    std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i)
      if (cell_idx[i] >= 0) order[cursor[cell_idx[i]]++] = static_cast<std::uint32_t>(i);
  }

  // Window z range for the height channel.
  double z_lo = points[0].z, z_hi = points[0].z;
  for (const auto& p : points) {
    z_lo = std::min(z_lo, p.z);
    z_hi = std::max(z_hi, p.z);
  }
  const double z_span = z_hi - z_lo;

  std::vector<Point3> cell_points;
  for (std::size_t c = 0; c < cells; ++c) {
    const std::uint32_t count = counts[c];
    if (count <= static_cast<std::uint32_t>(params.min_points)) continue;
    const int cx = static_cast<int>(c % R);
    const int cy = static_cast<int>(c / R);
    const double cell_x0 = origin_x + cx * ps;
    const double cell_y0 = origin_y + cy * ps;

    cell_points.clear();
    cell_points.reserve(count);
    double z_sum = 0.0;
    for (std::uint32_t k = offsets[c]; k < offsets[c + 1]; ++k) {
      const Point3& p = points[order[k]];
      // Cell-local coordinates keep the covariance identical under whole-cell
      // translations of the input.
      cell_points.emplace_back(p.x - cell_x0, p.y - cell_y0, p.z);
      z_sum += p.z;
    }
    const double mean_z = z_sum / count;
    const AngleResult ang = principal_angle(cell_points);

    const double density = std::min(count / params.density_cap, 1.0);
    const double height = z_span > 0.0 ? (mean_z - z_lo) / z_span : 0.0;
    const double angle = ang.radians / (std::numbers::pi / 2.0);
    img.at(FeatureImage::kDensity, cx, cy) = static_cast<float>(density);
    img.at(FeatureImage::kHeight, cx, cy) =
        static_cast<float>(std::clamp(height, 0.0, 1.0));
    img.at(FeatureImage::kAngle, cx, cy) =
        static_cast<float>(std::clamp(angle, 0.0, 1.0));
  }
  return img;
}

FeatureImage encode_pillars(const PointCloudMap& map, const LocalWindow& window,
                            const EncoderParams& params) {
  std::vector<Point3> pts;
  pts.reserve(window.point_indices.size());
  for (std::size_t i : window.point_indices) pts.push_back(map.points()[i]);
  return encode_pillars(pts, window.origin_x, window.origin_y, window.size, params);
}

void save_feature_image(const FeatureImage& img, const std::string& path,
                        const EncoderParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing");
  const std::uint32_t r = static_cast<std::uint32_t>(img.resolution);
  const std::uint32_t channels = 3;
  out.write(reinterpret_cast<const char*>(&r), sizeof(r));
  out.write(reinterpret_cast<const char*>(&channels), sizeof(channels));
  out.write(reinterpret_cast<const char*>(&img.pillar_side), sizeof(double));
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size() * sizeof(float)));
  if (!out) throw IoError(path + ": write failed");

  nlohmann::ordered_json side;
  side["resolution"] = params.resolution;
  side["min_points"] = params.min_points;
  side["density_cap"] = params.density_cap;
  side["origin_x"] = img.origin_x;
  side["origin_y"] = img.origin_y;
  side["window_size"] = img.window_size;
  std::ofstream sout(path + ".json");
  if (!sout) throw IoError(path + ".json: cannot open for writing");
  sout << side.dump(2) << "\n";
}

FeatureImage load_feature_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::uint32_t r = 0, channels = 0;
  double pillar_side = 0.0;
  in.read(reinterpret_cast<char*>(&r), sizeof(r));
  in.read(reinterpret_cast<char*>(&channels), sizeof(channels));
  in.read(reinterpret_cast<char*>(&pillar_side), sizeof(double));
  if (!in || channels != 3) throw IoError(path + ": bad feature image header");

  FeatureImage img;
  img.resolution = static_cast<int>(r);
  img.pillar_side = pillar_side;
  img.window_size = pillar_side * r;
  img.data.resize(3ull * r * r);
  in.read(reinterpret_cast<char*>(img.data.data()),
          static_cast<std::streamsize>(img.data.size() * sizeof(float)));
  if (!in) throw IoError(path + ": truncated feature image data");

  std::ifstream sin(path + ".json");
  if (sin) {
    nlohmann::json side = nlohmann::json::parse(sin, nullptr, false);
    if (!side.is_discarded()) {
      img.origin_x = side.value("origin_x", 0.0);
      img.origin_y = side.value("origin_y", 0.0);
      img.window_size = side.value("window_size", img.window_size);
    }
  }
  return img;
}

}  // namespace orchard
