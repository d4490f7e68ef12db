#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>

#include "orchardnav/cloud_io.hpp"
#include "orchardnav/geometry.hpp"
#include "test_util.hpp"

using namespace orchard;

TEST_CASE("xyz load reads points and bounds back") {
  testutil::TempDir dir("geom");
  const std::string path = dir.file("tiny.xyz");
  {
    std::ofstream out(path);
    out << "# comment line\n0 0 0\n1 0 0\n0 1 0\n";
  }
  const PointCloudMap map = load_pointcloud(path);
  REQUIRE(map.size() == 3);
  CHECK(map.bounds().x_min == 0.0);
  CHECK(map.bounds().x_max == 1.0);
  CHECK(map.bounds().y_max == 1.0);
  CHECK(map.bounds().z_min == 0.0);
  CHECK(map.bounds().z_max == 0.0);
}

TEST_CASE("non-finite line is rejected with its line number") {
  testutil::TempDir dir("geom");
  const std::string path = dir.file("bad.xyz");
  {
    std::ofstream out(path);
    out << "nan 0 0\n";
  }
  try {
    load_pointcloud(path);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(":1:") != std::string::npos);
  }
}

TEST_CASE("empty and malformed inputs error") {
  testutil::TempDir dir("geom");
  const std::string path = dir.file("empty.xyz");
  { std::ofstream out(path) << "# nothing but comments\n"; }
  CHECK_THROWS_AS(load_pointcloud(path), IoError);
  const std::string bad = dir.file("bad2.xyz");
  { std::ofstream out(bad) << "1 2\n"; }
  CHECK_THROWS_AS(load_pointcloud(bad), IoError);
  CHECK_THROWS_AS(load_pointcloud(dir.file("missing.xyz")), IoError);
}

TEST_CASE("save/load round trip preserves coordinates in every format") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  std::vector<Point3> pts;
  for (int i = 0; i < 200; ++i)
    pts.emplace_back(coord(rng), coord(rng), coord(rng), std::abs(coord(rng)));
  PointCloudMap map(pts);
  map.set_has_intensity(true);

  testutil::TempDir dir("geom");
  for (const char* name : {"cloud.xyz", "cloud.ply", "cloud.pcd"}) {
    const std::string path = dir.file(name);
    save_pointcloud(map, path);
    const PointCloudMap back = load_pointcloud(path);
    REQUIRE(back.size() == map.size());
    for (std::size_t i = 0; i < map.size(); ++i) {
      CHECK(back.points()[i].x == doctest::Approx(pts[i].x).epsilon(0).scale(1e-6));
      CHECK(back.points()[i].y == doctest::Approx(pts[i].y).epsilon(0).scale(1e-6));
      CHECK(back.points()[i].z == doctest::Approx(pts[i].z).epsilon(0).scale(1e-6));
    }
  }
}

TEST_CASE("iou_2d on the worked examples") {
  const Box2D a(0, 0, 1, 1);
  CHECK(iou_2d(a, a) == 1.0);
  CHECK(iou_2d(Box2D(0, 0, 1, 1), Box2D(2, 2, 3, 3)) == 0.0);
  // intersection 1, union 7
  CHECK(iou_2d(Box2D(0, 0, 2, 2), Box2D(1, 1, 3, 3)) ==
        doctest::Approx(1.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("iou is symmetric, bounded, and 1 on itself") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0.0, 10.0);
  std::uniform_real_distribution<double> size(0.1, 5.0);
  for (int i = 0; i < 500; ++i) {
    const double ax = pos(rng), ay = pos(rng), bx = pos(rng), by = pos(rng);
    const Box2D u(ax, ay, ax + size(rng), ay + size(rng));
    const Box2D v(bx, by, bx + size(rng), by + size(rng));
    const double uv = iou_2d(u, v);
    CHECK(uv == iou_2d(v, u));
    CHECK(uv >= 0.0);
    CHECK(uv <= 1.0);
    CHECK(iou_2d(u, u) == 1.0);
  }
}

TEST_CASE("degenerate boxes are rejected at construction") {
  CHECK_THROWS_AS(Box2D(0, 0, 0, 1), ConfigError);
  CHECK_THROWS_AS(Box2D(0, 0, 1, 0), ConfigError);
  CHECK_THROWS_AS(Box2D(1, 0, 0, 1), ConfigError);
  CHECK_THROWS_AS(Box3D(Box2D(0, 0, 1, 1), 2, 2), ConfigError);
  CHECK_THROWS_AS(Detection(Box2D(0, 0, 1, 1), 1.5), ConfigError);
}

TEST_CASE("nms keeps a single detection and drops overlapping lower scores") {
  std::vector<Detection> single{Detection(Box2D(0, 0, 1, 1), 0.7)};
  const auto kept = nms(single, 0.5);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].confidence == 0.7);

  std::vector<Detection> pair{Detection(Box2D(0, 0, 1, 1), 0.8),
                              Detection(Box2D(0, 0, 1, 1), 0.9)};
  const auto out = nms(pair, 0.5);
  REQUIRE(out.size() == 1);
  CHECK(out[0].confidence == 0.9);
}

TEST_CASE("nms equals the brute-force greedy oracle on random sets") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto dets = testutil::random_detections(rng, 10);
    const auto ours = nms(dets, 0.5);
    const auto oracle = testutil::nms_oracle(dets, 0.5);
    REQUIRE(ours.size() == oracle.size());
    for (std::size_t i = 0; i < ours.size(); ++i) {
      CHECK(ours[i].confidence == oracle[i].confidence);
      CHECK(ours[i].box.x_min == oracle[i].box.x_min);
      CHECK(ours[i].box.y_min == oracle[i].box.y_min);
    }
  }
}

TEST_CASE("nms is idempotent and output is a subset of input") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto dets = testutil::random_detections(rng, 12);
    const auto once = nms(dets, 0.4);
    const auto twice = nms(once, 0.4);
    REQUIRE(once.size() == twice.size());
    CHECK(once.size() <= dets.size());
    for (std::size_t i = 0; i < once.size(); ++i)
      CHECK(once[i].box.x_min == twice[i].box.x_min);
    // descending confidence and no kept pair above threshold
    for (std::size_t i = 0; i + 1 < once.size(); ++i)
      CHECK(once[i].confidence >= once[i + 1].confidence);
    for (std::size_t i = 0; i < once.size(); ++i)
      for (std::size_t j = i + 1; j < once.size(); ++j)
        CHECK(iou_2d(once[i].box, once[j].box) <= 0.4);
  }
}

TEST_CASE("detections serialize to JSON and back") {
  std::vector<Detection> dets;
  Detection d(Box2D(1, 2, 3, 4), 0.75, 0);
  d.z_min = 0.1;
  d.z_max = 2.5;
  dets.push_back(d);
  dets.emplace_back(Box2D(-1, -1, 0, 0), 0.5, 1);
  const auto text = detections_to_json(dets);
  const auto back = detections_from_json(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].box.x_min == 1.0);
  CHECK(back[0].has_z());
  CHECK(*back[0].z_max == 2.5);
  CHECK(back[1].class_id == 1);
  CHECK(!back[1].has_z());
}
