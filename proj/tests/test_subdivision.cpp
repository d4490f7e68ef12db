#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "orchardnav/window.hpp"
#include "test_util.hpp"

using namespace orchard;

namespace {

PointCloudMap grid_map(double x_span, double y_span, double step = 0.5) {
  std::vector<Point3> pts;
  for (double x = 0; x <= x_span; x += step)
    for (double y = 0; y <= y_span; y += step) pts.emplace_back(x, y, 0.0);
  return PointCloudMap(std::move(pts));
}

std::set<double> x_origins(const std::vector<LocalWindow>& windows) {
  std::set<double> xs;
  for (const auto& w : windows) xs.insert(w.origin_x);
  return xs;
}

}  // namespace

TEST_CASE("10/8 grid over a 26 m span lands on {0, 8, 16}") {
  const auto map = grid_map(26.0, 4.0);
  WindowSpec spec;  // 10 m window, 8 m stride
  const auto windows = generate_windows(map, spec);
  const auto xs = x_origins(windows);
  REQUIRE(xs.size() == 3);
  CHECK(xs.count(0.0));
  CHECK(xs.count(8.0));
  CHECK(xs.count(16.0));
  CHECK(spec.overlap() == doctest::Approx(2.0));
}

TEST_CASE("a 27 m span clamps the tail window to end at the map max") {
  const auto map = grid_map(27.0, 4.0);
  const auto windows = generate_windows(map, WindowSpec{});
  const auto xs = x_origins(windows);
  REQUIRE(xs.size() == 4);
  CHECK(xs.count(17.0));  // 27 - 10
}

TEST_CASE("map smaller than one window gets exactly one window at the min corner") {
  const auto map = grid_map(4.0, 3.0);
  const auto windows = generate_windows(map, WindowSpec{});
  REQUIRE(windows.size() == 1);
  CHECK(windows[0].origin_x == 0.0);
  CHECK(windows[0].origin_y == 0.0);
  CHECK(windows[0].point_indices.size() == map.size());
}

TEST_CASE("empty map is an error") {
  CHECK_THROWS_AS(generate_windows(PointCloudMap{}, WindowSpec{}), ConfigError);
}

TEST_CASE("windows are enumerated row-major and reproducibly") {
  const auto map = grid_map(20.0, 20.0);
  const auto a = generate_windows(map, WindowSpec{});
  const auto b = generate_windows(map, WindowSpec{});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].origin_x == b[i].origin_x);
    CHECK(a[i].origin_y == b[i].origin_y);
    CHECK(a[i].point_indices == b[i].point_indices);
  }
  for (std::size_t i = 1; i < a.size(); ++i) {
    const bool next_col = a[i].origin_x > a[i - 1].origin_x &&
                          a[i].origin_y == a[i - 1].origin_y;
    const bool next_row = a[i].origin_y > a[i - 1].origin_y;
    CHECK((next_col || next_row));
  }
}

TEST_CASE("every point lands in at least one window on random extents") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> span(1.0, 40.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const double sx = span(rng), sy = span(rng);
    std::vector<Point3> pts;
    for (int i = 0; i < 300; ++i)
      pts.emplace_back(unit(rng) * sx, unit(rng) * sy, unit(rng));
    // force the exact extremes to exist
    pts.emplace_back(0, 0, 0);
    pts.emplace_back(sx, sy, 0);
    const PointCloudMap map(std::move(pts));
    const auto windows = generate_windows(map, WindowSpec{});

    std::vector<int> hits(map.size(), 0);
    for (const auto& w : windows) {
      for (std::size_t pi : w.point_indices) {
        hits[pi]++;
        const auto& p = map.points()[pi];
        CHECK(w.contains(p.x, p.y));
      }
    }
    for (int h : hits) CHECK(h >= 1);
  }
}

TEST_CASE("points in the overlap strip belong to at least two windows") {
  const auto map = grid_map(26.0, 4.0);
  const auto windows = generate_windows(map, WindowSpec{});
  // overlap strip of the first two column windows: x in [8, 10)
  for (std::size_t pi = 0; pi < map.size(); ++pi) {
    const auto& p = map.points()[pi];
    if (p.x < 8.0 || p.x >= 10.0) continue;
    int count = 0;
    for (const auto& w : windows)
      if (std::find(w.point_indices.begin(), w.point_indices.end(), pi) !=
          w.point_indices.end())
        ++count;
    CHECK(count >= 2);
  }
}

TEST_CASE("merge translates a detection into global coordinates") {
  LocalWindow w;
  w.origin_x = 8.0;
  w.origin_y = 0.0;
  w.size = 10.0;
  std::vector<std::pair<const LocalWindow*, std::vector<Detection>>> per_window;
  per_window.emplace_back(&w, std::vector<Detection>{
                                  Detection(Box2D(2, 2, 4, 4), 0.9)});
  const auto merged = merge_window_detections(per_window, 0.5);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].box.x_min == 10.0);
  CHECK(merged[0].box.y_min == 2.0);
  CHECK(merged[0].box.x_max == 12.0);
  CHECK(merged[0].box.y_max == 4.0);
}

TEST_CASE("cross-window duplicates collapse to the strongest detection") {
  LocalWindow a;
  a.origin_x = 0;
  a.origin_y = 0;
  a.size = 10;
  LocalWindow b;
  b.origin_x = 8;
  b.origin_y = 0;
  b.size = 10;
  // the same tree seen at global (8.5, 2)-(9.5, 3)
  std::vector<std::pair<const LocalWindow*, std::vector<Detection>>> per_window;
  per_window.emplace_back(&a, std::vector<Detection>{
                                  Detection(Box2D(8.5, 2.0, 9.5, 3.0), 0.9)});
  per_window.emplace_back(&b, std::vector<Detection>{
                                  Detection(Box2D(0.45, 2.0, 1.55, 3.05), 0.7)});
  const auto merged = merge_window_detections(per_window, 0.5);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].confidence == 0.9);
}

TEST_CASE("merge of empty per-window lists is empty") {
  LocalWindow w;
  w.size = 10;
  std::vector<std::pair<const LocalWindow*, std::vector<Detection>>> per_window;
  per_window.emplace_back(&w, std::vector<Detection>{});
  CHECK(merge_window_detections(per_window, 0.5).empty());
}

TEST_CASE("a detection outside its window extent violates the contract") {
  LocalWindow w;
  w.size = 10;
  std::vector<std::pair<const LocalWindow*, std::vector<Detection>>> per_window;
  per_window.emplace_back(&w, std::vector<Detection>{
                                  Detection(Box2D(8, 8, 11, 9), 0.9)});
  CHECK_THROWS_AS(merge_window_detections(per_window, 0.5), PipelineError);
}

TEST_CASE("merged output equals translate-then-oracle-NMS on random inputs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(0.0, 7.0);
  std::uniform_real_distribution<double> size(0.5, 3.0);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    LocalWindow a;
    a.origin_x = 0;
    a.size = 10;
    LocalWindow b;
    b.origin_x = 8;
    b.size = 10;
    std::vector<std::pair<const LocalWindow*, std::vector<Detection>>> per_window;
    std::vector<Detection> global;
    for (const LocalWindow* w : {&a, &b}) {
      std::vector<Detection> dets;
      const int n = static_cast<int>(pos(rng));
      for (int i = 0; i < n; ++i) {
        const double x = pos(rng), y = pos(rng);
        Detection d(Box2D(x, y, x + size(rng), y + size(rng)), conf(rng));
        dets.push_back(d);
        global.emplace_back(d.box.translated(w->origin_x, w->origin_y),
                            d.confidence);
      }
      per_window.emplace_back(w, dets);
    }
    const auto merged = merge_window_detections(per_window, 0.5);
    const auto oracle = testutil::nms_oracle(global, 0.5);
    REQUIRE(merged.size() == oracle.size());
    for (std::size_t i = 0; i < merged.size(); ++i) {
      CHECK(merged[i].box.x_min == doctest::Approx(oracle[i].box.x_min));
      CHECK(merged[i].confidence == oracle[i].confidence);
    }
  }
}
