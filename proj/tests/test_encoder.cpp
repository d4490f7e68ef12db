#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "orchardnav/encoder.hpp"
#include "test_util.hpp"

using namespace orchard;

namespace {

// Lattice-snapped coordinates (multiples of pillar_side/16) keep the
// arithmetic exact so equivariance can be checked bitwise.
constexpr double kWindow = 10.0;
constexpr int kRes = 128;
constexpr double kPs = kWindow / kRes;
constexpr double kUnit = kPs / 16.0;

std::vector<Point3> cell_cluster(int ix, int iy, int n, double z0, double dz) {
  std::vector<Point3> pts;
  for (int k = 0; k < n; ++k)
    pts.emplace_back(ix * kPs + 5 * kUnit, iy * kPs + 7 * kUnit, z0 + k * dz);
  return pts;
}

}  // namespace

TEST_CASE("pillar side and footprint for 10 m at 128 cells") {
  const auto img = encode_pillars(std::vector<Point3>{}, 0, 0, kWindow,
                                  EncoderParams{});
  CHECK(img.pillar_side == 10.0 / 128.0);
  CHECK(img.pillar_side == 0.078125);
  CHECK(img.pillar_side * img.pillar_side == 0.006103515625);
  CHECK(img.pillar_side * kRes == kWindow);
}

TEST_CASE("empty window encodes to all zeros") {
  const auto img = encode_pillars(std::vector<Point3>{}, 0, 0, kWindow,
                                  EncoderParams{});
  REQUIRE(img.data.size() == 3u * kRes * kRes);
  for (float v : img.data) CHECK(v == 0.0f);
}

TEST_CASE("principal_angle of a vertical line is zero") {
  std::vector<Point3> pts;
  for (int i = 0; i < 30; ++i) pts.emplace_back(1.0, 2.0, 0.1 * i);
  const auto r = principal_angle(pts);
  CHECK(!r.degenerate);
  CHECK(r.radians == doctest::Approx(0.0).epsilon(0).scale(1e-9));
}

TEST_CASE("principal_angle of a horizontal plane is pi/2") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point3> pts;
  for (int i = 0; i < 200; ++i) pts.emplace_back(u(rng), u(rng), 4.0);
  const auto r = principal_angle(pts);
  CHECK(!r.degenerate);
  CHECK(r.radians == doctest::Approx(std::numbers::pi / 2).epsilon(1e-9));
}

TEST_CASE("coincident points are degenerate and report pi/2") {
  std::vector<Point3> pts(5, Point3(1, 1, 1));
  const auto r = principal_angle(pts);
  CHECK(r.degenerate);
  CHECK(r.radians == doctest::Approx(std::numbers::pi / 2));
  CHECK(principal_angle(std::vector<Point3>{Point3(0, 0, 0)}).degenerate);
}

TEST_CASE("principal_angle matches the Jacobi oracle on random pillars") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-0.04, 0.04);
  std::uniform_real_distribution<double> zdist(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point3> pts;
    for (int i = 0; i < 50; ++i) pts.emplace_back(u(rng), u(rng), zdist(rng));
    const auto ours = principal_angle(pts);
    const double oracle = testutil::principal_angle_oracle(pts);
    CHECK(std::abs(ours.radians - oracle) < 1e-6);
  }
}

TEST_CASE("a 150-point vertical pillar fills exactly one cell") {
  const auto pts = cell_cluster(10, 20, 150, 0.0, 0.02);
  EncoderParams params;  // min_points 100, cap 500
  const auto img = encode_pillars(pts, 0, 0, kWindow, params);
  for (int iy = 0; iy < kRes; ++iy) {
    for (int ix = 0; ix < kRes; ++ix) {
      if (ix == 10 && iy == 20) continue;
      CHECK(img.at(FeatureImage::kDensity, ix, iy) == 0.0f);
      CHECK(img.at(FeatureImage::kHeight, ix, iy) == 0.0f);
      CHECK(img.at(FeatureImage::kAngle, ix, iy) == 0.0f);
    }
  }
  CHECK(img.at(FeatureImage::kDensity, 10, 20) == doctest::Approx(150.0 / 500.0));
  // vertical line: principal vector along z, angle 0
  CHECK(img.at(FeatureImage::kAngle, 10, 20) == 0.0f);
  const double oracle = testutil::principal_angle_oracle(pts);
  CHECK(oracle == doctest::Approx(0.0).epsilon(0).scale(1e-9));
}

TEST_CASE("cells at or below min_points stay exactly zero") {
  EncoderParams params;
  params.min_points = 10;
  std::vector<Point3> pts = cell_cluster(4, 4, 10, 0, 0.1);        // == floor
  const auto more = cell_cluster(8, 8, 11, 0, 0.1);                // > floor
  pts.insert(pts.end(), more.begin(), more.end());
  const auto img = encode_pillars(pts, 0, 0, kWindow, params);
  CHECK(img.at(FeatureImage::kDensity, 4, 4) == 0.0f);
  CHECK(img.at(FeatureImage::kHeight, 4, 4) == 0.0f);
  CHECK(img.at(FeatureImage::kAngle, 4, 4) == 0.0f);
  CHECK(img.at(FeatureImage::kDensity, 8, 8) > 0.0f);
}

TEST_CASE("every emitted channel value lies in [0,1] on random windows") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pos(0.0, kWindow);
  std::uniform_real_distribution<double> z(-3.0, 9.0);
  EncoderParams params;
  params.min_points = 0;
  params.density_cap = 20;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Point3> pts;
    for (int i = 0; i < 5000; ++i) pts.emplace_back(pos(rng), pos(rng), z(rng));
    const auto img = encode_pillars(pts, 0, 0, kWindow, params);
    for (float v : img.data) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
  }
}

TEST_CASE("points on the far edge land in the closed final row and column") {
  std::vector<Point3> pts;
  for (int k = 0; k < 5; ++k) pts.emplace_back(kWindow, kWindow, 0.5 * k);
  EncoderParams params;
  params.min_points = 0;
  const auto img = encode_pillars(pts, 0, 0, kWindow, params);
  CHECK(img.at(FeatureImage::kDensity, kRes - 1, kRes - 1) > 0.0f);
}

TEST_CASE("whole-cell translation shifts the image by whole cells, bitwise") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> cell(2, 60);
  std::uniform_int_distribution<int> off(1, 15);
  EncoderParams params;
  params.min_points = 2;
  params.density_cap = 16;

  std::vector<Point3> pts;
  for (int c = 0; c < 40; ++c) {
    const int ix = cell(rng), iy = cell(rng);
    for (int k = 0; k < 8; ++k)
      pts.emplace_back(ix * kPs + off(rng) * kUnit, iy * kPs + off(rng) * kUnit,
                       0.25 * k + 0.125 * off(rng));
  }
  const int shift_x = 13, shift_y = 7;
  std::vector<Point3> moved = pts;
  for (auto& p : moved) {
    p.x += shift_x * kPs;
    p.y += shift_y * kPs;
  }
  const auto img0 = encode_pillars(pts, 0, 0, kWindow, params);
  const auto img1 = encode_pillars(moved, 0, 0, kWindow, params);
  for (int iy = 2; iy <= 60; ++iy) {
    for (int ix = 2; ix <= 60; ++ix) {
      for (int c = 0; c < 3; ++c) {
        CHECK(img0.at(c, ix, iy) == img1.at(c, ix + shift_x, iy + shift_y));
      }
    }
  }
}

TEST_CASE("rotating vertical pillars by 90 degrees rotates the image") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> cell(10, 110);
  EncoderParams params;
  params.min_points = 2;
  params.density_cap = 16;

  std::vector<Point3> pts;
  std::vector<std::pair<int, int>> cells;
  for (int c = 0; c < 25; ++c) {
    const int ix = cell(rng), iy = cell(rng);
    cells.emplace_back(ix, iy);
    auto cluster = cell_cluster(ix, iy, 6, 0.0, 0.3);
    pts.insert(pts.end(), cluster.begin(), cluster.end());
  }
  // rotate 90 degrees CCW about the window center (5,5)
  std::vector<Point3> rot = pts;
  for (auto& p : rot) {
    const double x = p.x, y = p.y;
    p.x = kWindow - y;
    p.y = x;
  }
  const auto img0 = encode_pillars(pts, 0, 0, kWindow, params);
  const auto img1 = encode_pillars(rot, 0, 0, kWindow, params);
  for (const auto& [ix, iy] : cells) {
    for (int c = 0; c < 3; ++c) {
      CHECK(img0.at(c, ix, iy) == img1.at(c, kRes - 1 - iy, ix));
    }
  }
}

TEST_CASE("feature image binary round trip") {
  const auto pts = cell_cluster(10, 20, 150, 0.0, 0.02);
  EncoderParams params;
  const auto img = encode_pillars(pts, 0, 0, kWindow, params);
  testutil::TempDir dir("enc");
  const std::string path = dir.file("img.fimg");
  save_feature_image(img, path, params);
  const auto back = load_feature_image(path);
  CHECK(back.resolution == img.resolution);
  CHECK(back.pillar_side == img.pillar_side);
  REQUIRE(back.data.size() == img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i)
    CHECK(back.data[i] == img.data[i]);
}

TEST_CASE("encoding is deterministic") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> pos(0.0, kWindow);
  std::vector<Point3> pts;
  for (int i = 0; i < 3000; ++i) pts.emplace_back(pos(rng), pos(rng), pos(rng));
  EncoderParams params;
  params.min_points = 3;
  const auto a = encode_pillars(pts, 0, 0, kWindow, params);
  const auto b = encode_pillars(pts, 0, 0, kWindow, params);
  CHECK(a.data == b.data);
}
