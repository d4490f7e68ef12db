#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "orchardnav/terrain.hpp"
#include "test_util.hpp"

using namespace orchard;

namespace {

PointCloudMap plane_cloud(double span, double step, double z = 0.0) {
  std::vector<Point3> pts;
  for (double x = 0; x <= span; x += step)
    for (double y = 0; y <= span; y += step) pts.emplace_back(x, y, z);
  return PointCloudMap(std::move(pts));
}

struct BoxScene {
  PointCloudMap map;
  std::vector<std::size_t> plane_indices;
  std::vector<std::size_t> box_top_indices;
};

// Flat plane with a 1x1 m box of points standing 2 m tall at the center.
BoxScene plane_with_box(double span = 10.0, double step = 0.05) {
  BoxScene scene;
  std::vector<Point3> pts;
  for (double x = 0; x <= span; x += step)
    for (double y = 0; y <= span; y += step) {
      scene.plane_indices.push_back(pts.size());
      pts.emplace_back(x, y, 0.0);
    }
  const double c0 = span / 2 - 0.5, c1 = span / 2 + 0.5;
  for (double x = c0; x <= c1; x += step)
    for (double y = c0; y <= c1; y += step) {
      scene.box_top_indices.push_back(pts.size());
      pts.emplace_back(x, y, 2.0);
    }
  // side curtains
  for (double z = step; z < 2.0; z += 4 * step) {
    for (double t = 0; t <= 1.0; t += 4 * step) {
      pts.emplace_back(c0 + t, c0, z);
      pts.emplace_back(c0 + t, c1, z);
      pts.emplace_back(c0, c0 + t, z);
      pts.emplace_back(c1, c0 + t, z);
    }
  }
  scene.map = PointCloudMap(std::move(pts));
  return scene;
}

PointCloudMap rolling_cloud(double span, double step, double amplitude,
                            double wavelength) {
  std::vector<Point3> pts;
  const double w = 2 * std::numbers::pi / wavelength;
  for (double x = 0; x <= span; x += step)
    for (double y = 0; y <= span; y += step)
      pts.emplace_back(x, y, amplitude * std::sin(w * x) * std::sin(w * y));
  return PointCloudMap(std::move(pts));
}

}  // namespace

TEST_CASE("a flat plane is entirely ground at the tuned operating point") {
  const auto map = plane_cloud(10.0, 0.1);
  CsfParams params;  // resolution 0.1, threshold 0.1
  const auto seg = csf_segment(map, params);
  CHECK(seg.ground_indices.size() == map.size());
  CHECK(seg.nonground_indices.empty());
  CHECK(seg.settled);
}

TEST_CASE("box tops stand out of the ground while the plane stays ground") {
  const auto scene = plane_with_box();
  CsfParams params;
  const auto seg = csf_segment(scene.map, params);
  std::vector<bool> is_ground(scene.map.size(), false);
  for (std::size_t i : seg.ground_indices) is_ground[i] = true;

  for (std::size_t i : scene.box_top_indices) CHECK(!is_ground[i]);
  std::size_t plane_ground = 0;
  for (std::size_t i : scene.plane_indices)
    if (is_ground[i]) ++plane_ground;
  CHECK(plane_ground >=
        static_cast<std::size_t>(0.99 * scene.plane_indices.size()));
}

TEST_CASE("every input point receives exactly one label") {
  const auto scene = plane_with_box();
  const auto seg = csf_segment(scene.map, CsfParams{});
  CHECK(seg.ground_indices.size() + seg.nonground_indices.size() ==
        scene.map.size());
  std::vector<int> seen(scene.map.size(), 0);
  for (std::size_t i : seg.ground_indices) seen[i]++;
  for (std::size_t i : seg.nonground_indices) seen[i]++;
  for (int s : seen) CHECK(s == 1);
}

TEST_CASE("the cloth never rests below the inverted surface it collided with") {
  const auto map = rolling_cloud(8.0, 0.1, 0.5, 4.0);
  CsfParams params;
  ClothState cloth;
  csf_segment(map, params, &cloth);
  for (std::size_t c = 0; c < cloth.heights.size(); ++c)
    CHECK(cloth.heights[c] >= cloth.collision_heights[c] - 1e-9);
}

TEST_CASE("enlarging the class threshold never shrinks the ground set") {
  const auto map = rolling_cloud(8.0, 0.2, 0.4, 4.0);
  CsfParams narrow;
  narrow.class_threshold = 0.05;
  CsfParams wide;
  wide.class_threshold = 0.2;
  const auto seg_narrow = csf_segment(map, narrow);
  const auto seg_wide = csf_segment(map, wide);
  std::vector<bool> wide_ground(map.size(), false);
  for (std::size_t i : seg_wide.ground_indices) wide_ground[i] = true;
  for (std::size_t i : seg_narrow.ground_indices) CHECK(wide_ground[i]);
  CHECK(seg_wide.ground_indices.size() >= seg_narrow.ground_indices.size());
}

TEST_CASE("fine cloth tracks rolling terrain better and costs more time") {
  const auto map = rolling_cloud(12.0, 0.1, 0.8, 8.0);
  std::vector<std::size_t> truth(map.size());
  for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = i;

  using clock = std::chrono::steady_clock;
  CsfParams fine;
  fine.cloth_resolution = 0.1;
  const auto t0 = clock::now();
  const auto seg_fine = csf_segment(map, fine);
  const auto t1 = clock::now();
  CsfParams coarse;
  coarse.cloth_resolution = 0.5;
  const auto t2 = clock::now();
  const auto seg_coarse = csf_segment(map, coarse);
  const auto t3 = clock::now();

  const auto [ser_f, sar_f] = compute_ser_sar(seg_fine, truth, map.size());
  const auto [ser_c, sar_c] = compute_ser_sar(seg_coarse, truth, map.size());
  CHECK(sar_f > sar_c);
  CHECK(std::chrono::duration<double>(t1 - t0).count() >
        std::chrono::duration<double>(t3 - t2).count());
  (void)ser_f;
  (void)ser_c;
}

TEST_CASE("ser/sar set arithmetic") {
  GroundSegmentation pred;
  std::vector<std::size_t> truth;
  for (std::size_t i = 0; i < 100; ++i) truth.push_back(i);

  SUBCASE("perfect prediction") {
    pred.ground_indices = truth;
    const auto [ser, sar] = compute_ser_sar(pred, truth, 200);
    CHECK(ser == 0.0);
    CHECK(sar == 1.0);
  }
  SUBCASE("empty prediction") {
    const auto [ser, sar] = compute_ser_sar(pred, truth, 200);
    CHECK(ser == 0.0);
    CHECK(sar == 0.0);
  }
  SUBCASE("five spilled points") {
    pred.ground_indices = truth;
    for (std::size_t k = 0; k < 5; ++k) pred.ground_indices.push_back(100 + k);
    const auto [ser, sar] = compute_ser_sar(pred, truth, 200);
    CHECK(ser == doctest::Approx(0.05));
    CHECK(sar == 1.0);
  }
  SUBCASE("empty truth is an error") {
    CHECK_THROWS_AS(compute_ser_sar(pred, {}, 200), ConfigError);
  }
}

TEST_CASE("too few iterations report an unsettled cloth but still classify") {
  const auto map = plane_cloud(5.0, 0.2, 0.0);
  CsfParams params;
  params.iterations = 1;
  const auto seg = csf_segment(map, params);
  CHECK(!seg.settled);
  CHECK(seg.residual > 1e-4);
  CHECK(seg.ground_indices.size() + seg.nonground_indices.size() == map.size());
}

TEST_CASE("parameter validation") {
  CsfParams params;
  params.cloth_resolution = 0;
  CHECK_THROWS_AS(params.validate(), ConfigError);
  params = {};
  params.rigidness = 4;
  CHECK_THROWS_AS(params.validate(), ConfigError);
  params = {};
  params.iterations = 0;
  CHECK_THROWS_AS(params.validate(), ConfigError);
  CHECK_THROWS_AS(csf_segment(PointCloudMap{}, CsfParams{}), ConfigError);
}
