#include "orchardnav/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace orchard {

using json = nlohmann::ordered_json;

std::vector<PointClass> fuse_labels(const PointCloudMap& map,
                                    const std::vector<Detection>& trees,
                                    const GroundSegmentation& ground) {
  std::vector<bool> is_ground(map.size(), false);
  for (std::size_t i : ground.ground_indices)
    if (i < map.size()) is_ground[i] = true;

  std::vector<Box3D> boxes;
  boxes.reserve(trees.size());
  for (const auto& t : trees)
    if (t.has_z()) boxes.push_back(t.box3d());

  std::vector<PointClass> labels(map.size(), PointClass::Obstacle);
  const auto& pts = map.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool in_tree = false;
    for (const auto& box : boxes) {
      if (box.contains(pts[i])) {
        in_tree = true;
        break;
      }
    }
    if (in_tree) labels[i] = PointClass::Tree;
    else if (is_ground[i]) labels[i] = PointClass::Ground;
  }
  return labels;
}

namespace {

struct Center {
  double x, y;
  std::size_t tree;
};

double line_distance(double theta, double rho, const Center& c) {
  return std::abs(c.x * std::cos(theta) + c.y * std::sin(theta) - rho);
}

// Total least squares line through the centers, reported in normal form
// with theta in [0, pi).
std::pair<double, double> fit_line(const std::vector<Center>& pts) {
  double mx = 0, my = 0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : pts) {
    const double dx = p.x - mx, dy = p.y - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double dir = 0.5 * std::atan2(2.0 * sxy, sxx - syy);  // major axis
  double theta = dir + std::numbers::pi / 2.0;                // its normal
  while (theta < 0) theta += std::numbers::pi;
  while (theta >= std::numbers::pi) theta -= std::numbers::pi;
  const double rho = mx * std::cos(theta) + my * std::sin(theta);
  return {theta, rho};
}

}  // namespace

std::vector<TreeRow> detect_tree_rows(const std::vector<Detection>& trees,
                                      const RowParams& params) {
  if (params.min_trees_per_row < 1)
    throw ConfigError("min_trees_per_row must be >= 1");
  if (!(params.lateral_tolerance > 0))
    throw ConfigError("lateral_tolerance must be > 0");

  std::vector<Center> remaining;
  remaining.reserve(trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i)
    remaining.push_back({trees[i].box.center_x(), trees[i].box.center_y(), i});

  std::vector<TreeRow> rows;
  if (remaining.size() < static_cast<std::size_t>(params.min_trees_per_row))
    return rows;

  // Accumulator: theta in 1 degree bins over [0, pi), rho in bins of half
  // the assignment tolerance so peaks are not split across bins.
  constexpr int kThetaBins = 180;
  const double rho_bin = params.lateral_tolerance / 2.0;
  double rho_max = 0.0;
  for (const auto& c : remaining)
    rho_max = std::max(rho_max, std::hypot(c.x, c.y));
  rho_max += rho_bin;
  const int rho_bins = std::max(1, static_cast<int>(std::ceil(2.0 * rho_max / rho_bin)));

  std::vector<int> acc(static_cast<std::size_t>(kThetaBins) * rho_bins);
  while (remaining.size() >= static_cast<std::size_t>(params.min_trees_per_row)) {
    std::fill(acc.begin(), acc.end(), 0);
    for (const auto& c : remaining) {
      for (int k = 0; k < kThetaBins; ++k) {
        const double theta = (k + 0.5) * std::numbers::pi / kThetaBins;
        const double rho = c.x * std::cos(theta) + c.y * std::sin(theta);
        int r = static_cast<int>(std::floor((rho + rho_max) / rho_bin));
        r = std::clamp(r, 0, rho_bins - 1);
        ++acc[static_cast<std::size_t>(k) * rho_bins + r];
      }
    }
    int best = 0;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < acc.size(); ++i) {
      if (acc[i] > best) {
        best = acc[i];
        best_idx = i;
      }
    }
    if (best < params.min_trees_per_row) break;

    const int tk = static_cast<int>(best_idx / rho_bins);
    const int tr = static_cast<int>(best_idx % rho_bins);
    const double peak_theta = (tk + 0.5) * std::numbers::pi / kThetaBins;
    const double peak_rho = (tr + 0.5) * rho_bin - rho_max;

    std::vector<Center> claimed;
    for (const auto& c : remaining)
      if (line_distance(peak_theta, peak_rho, c) <= params.lateral_tolerance)
        claimed.push_back(c);
    if (claimed.size() < static_cast<std::size_t>(params.min_trees_per_row)) break;

    auto [theta, rho] = fit_line(claimed);
    std::vector<Center> members;
    for (const auto& c : claimed)
      if (line_distance(theta, rho, c) <= params.lateral_tolerance)
        members.push_back(c);
    if (members.size() < static_cast<std::size_t>(params.min_trees_per_row)) break;

    const double dx = -std::sin(theta), dy = std::cos(theta);
    std::stable_sort(members.begin(), members.end(),
                     [&](const Center& a, const Center& b) {
                       return a.x * dx + a.y * dy < b.x * dx + b.y * dy;
                     });

    TreeRow row;
    row.theta = theta;
    row.rho = rho;
    for (const auto& m : members) row.member_trees.push_back(m.tree);
    const double t0 = members.front().x * dx + members.front().y * dy;
    const double t1 = members.back().x * dx + members.back().y * dy;
    row.end_x0 = rho * std::cos(theta) + t0 * dx;
    row.end_y0 = rho * std::sin(theta) + t0 * dy;
    row.end_x1 = rho * std::cos(theta) + t1 * dx;
    row.end_y1 = rho * std::sin(theta) + t1 * dy;
    rows.push_back(std::move(row));

    std::vector<Center> next;
    for (const auto& c : remaining) {
      bool taken = false;
      for (const auto& m : members)
        if (m.tree == c.tree) {
          taken = true;
          break;
        }
      if (!taken) next.push_back(c);
    }
    remaining = std::move(next);
  }
  return rows;
}

void save_labeled_cloud(const PointCloudMap& map,
                        const std::vector<PointClass>& labels,
                        const std::string& path) {
  if (labels.size() != map.size())
    throw ConfigError("label count does not match point count");
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  static const char* names[] = {"tree", "ground", "obstacle"};
  char buf[96];
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto& p = map.points()[i];
    std::snprintf(buf, sizeof(buf), "%.10g %.10g %.10g %s\n", p.x, p.y, p.z,
                  names[static_cast<int>(labels[i])]);
    out << buf;
  }
}

std::string semantic_map_to_json(const SemanticMap& semantic) {
  json j;
  json trees = json::array();
  for (const auto& t : semantic.trees) {
    json box;
    box["x_min"] = t.box.x_min;
    box["y_min"] = t.box.y_min;
    box["x_max"] = t.box.x_max;
    box["y_max"] = t.box.y_max;
    if (t.has_z()) {
      box["z_min"] = *t.z_min;
      box["z_max"] = *t.z_max;
    }
    json jt;
    jt["box"] = box;
    jt["confidence"] = t.confidence;
    jt["class_id"] = t.class_id;
    trees.push_back(jt);
  }
  j["trees"] = trees;
  json rows = json::array();
  for (const auto& r : semantic.rows) {
    json jr;
    jr["theta"] = r.theta;
    jr["rho"] = r.rho;
    jr["members"] = r.member_trees;
    jr["endpoints"] = json::array(
        {json::array({r.end_x0, r.end_y0}), json::array({r.end_x1, r.end_y1})});
    rows.push_back(jr);
  }
  j["rows"] = rows;
  j["unassigned_trees"] = semantic.unassigned_trees;
  return j.dump(2);
}

void save_semantic_map(const SemanticMap& semantic, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << semantic_map_to_json(semantic) << "\n";
}

SemanticMap load_semantic_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw IoError(path + ": invalid JSON");

  SemanticMap semantic;
  for (const auto& jt : j.value("trees", json::array())) {
    const auto& box = jt.at("box");
    Detection d(Box2D(box.at("x_min").get<double>(), box.at("y_min").get<double>(),
                      box.at("x_max").get<double>(), box.at("y_max").get<double>()),
                jt.value("confidence", 1.0), jt.value("class_id", 0));
    if (box.contains("z_min") && box.contains("z_max")) {
      d.z_min = box.at("z_min").get<double>();
      d.z_max = box.at("z_max").get<double>();
    }
    semantic.trees.push_back(d);
  }
  for (const auto& jr : j.value("rows", json::array())) {
    TreeRow r;
    r.theta = jr.at("theta").get<double>();
    r.rho = jr.at("rho").get<double>();
    for (const auto& m : jr.at("members")) r.member_trees.push_back(m.get<std::size_t>());
    const auto& ends = jr.at("endpoints");
    r.end_x0 = ends[0][0].get<double>();
    r.end_y0 = ends[0][1].get<double>();
    r.end_x1 = ends[1][0].get<double>();
    r.end_y1 = ends[1][1].get<double>();
    semantic.rows.push_back(std::move(r));
  }
  for (const auto& u : j.value("unassigned_trees", json::array()))
    semantic.unassigned_trees.push_back(u.get<std::size_t>());
  return semantic;
}

}  // namespace orchard
