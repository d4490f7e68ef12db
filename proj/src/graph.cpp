#include "orchardnav/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include <nlohmann/json.hpp>

namespace orchard {

using json = nlohmann::ordered_json;

namespace {

struct Vec2 {
  double x = 0, y = 0;
  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2 * std::numbers::pi;
  while (a < -std::numbers::pi) a += 2 * std::numbers::pi;
  return a;
}

double heading_diff(double a, double b) { return std::abs(wrap_angle(a - b)); }

// Internal row description shared by the detected and manual entry points.
struct RowGeom {
  double theta = 0, rho = 0;
  Vec2 dir;          // canonical along-row direction
  Vec2 normal;       // (cos theta, sin theta)
  Vec2 centroid;
  double canopy_radius = 0;
  std::vector<Vec2> centers;           // sorted along dir
  std::vector<int> tree_refs;          // parallel to centers
};

Vec2 canonical_dir(double theta) {
  Vec2 d{-std::sin(theta), std::cos(theta)};
  if (d.x < 0 || (d.x == 0 && d.y < 0)) d = d * -1.0;
  return d;
}

RowGeom make_row_geom(double theta, double rho, std::vector<Vec2> centers,
                      std::vector<int> refs, double canopy_radius) {
  RowGeom g;
  g.theta = theta;
  g.rho = rho;
  g.dir = canonical_dir(theta);
  g.normal = {std::cos(theta), std::sin(theta)};
  g.canopy_radius = canopy_radius;
  for (const auto& c : centers) g.centroid = g.centroid + c;
  g.centroid = g.centroid * (1.0 / centers.size());

  std::vector<std::size_t> order(centers.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return centers[a].dot(g.dir) < centers[b].dot(g.dir);
  });
  for (std::size_t i : order) {
    g.centers.push_back(centers[i]);
    g.tree_refs.push_back(refs[i]);
  }
  return g;
}

struct LaneSpec {
  int row = -1;       // source row (original index)
  int corridor = -1;
  Vec2 dir;           // travel direction
  Vec2 line_point;    // point on the lane centerline with projection 0
  double t_entry = 0, t_exit = 0;
  RowSide side = RowSide::Left;
  const RowGeom* geom = nullptr;
};

// Point on the lane centerline at projection parameter t along dir.
Vec2 lane_point(const LaneSpec& lane, double t) {
  return lane.line_point + lane.dir * t;
}

struct Builder {
  VisibilityGraph graph;

  int add_node(Vec2 p, double heading, NodeKind kind, int tree, int row,
               int corridor, RowSide side) {
    AccessNode n;
    n.id = static_cast<int>(graph.nodes.size());
    n.x = p.x;
    n.y = p.y;
    n.heading = heading;
    n.kind = kind;
    n.tree_ref = tree;
    n.row_ref = row;
    n.corridor_ref = corridor;
    n.side = side;
    graph.nodes.push_back(n);
    return n.id;
  }

  void add_edge(int from, int to, EdgeKind kind, double heading, int corridor) {
    CorridorEdge e;
    e.from = from;
    e.to = to;
    const auto& a = graph.nodes[from];
    const auto& b = graph.nodes[to];
    e.length = std::hypot(b.x - a.x, b.y - a.y);
    e.kind = kind;
    e.heading = kind == EdgeKind::Lane && e.length > 0
                    ? std::atan2(b.y - a.y, b.x - a.x)
                    : heading;
    e.corridor_ref = corridor;
    graph.edges.push_back(e);
  }
};

struct LaneNodes {
  int entry = -1;  // row_end node where the lane is entered
  int exit = -1;   // uturn node where the lane is left
};

// Emits one lane: entry terminal, tree access nodes in travel order, exit
// terminal, and the connecting lane edges.
LaneNodes emit_lane(Builder& b, const LaneSpec& lane) {
  const double heading = std::atan2(lane.dir.y, lane.dir.x);
  const bool forward = lane.t_exit > lane.t_entry;

  LaneNodes out;
  out.entry = b.add_node(lane_point(lane, lane.t_entry), heading, NodeKind::RowEnd,
                         -1, lane.row, lane.corridor, lane.side);
  int prev = out.entry;
  const auto& geom = *lane.geom;
  const std::size_t n = geom.centers.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = forward ? k : n - 1 - k;
    const double t = geom.centers[i].dot(lane.dir);
    const int node = b.add_node(lane_point(lane, t), heading, NodeKind::TreeAccess,
                                geom.tree_refs[i], lane.row, lane.corridor,
                                lane.side);
    b.add_edge(prev, node, EdgeKind::Lane, heading, lane.corridor);
    prev = node;
  }
  out.exit = b.add_node(lane_point(lane, lane.t_exit), heading, NodeKind::UTurn,
                        -1, lane.row, lane.corridor, lane.side);
  b.add_edge(prev, out.exit, EdgeKind::Lane, heading, lane.corridor);
  return out;
}

RowSide side_of(const RowGeom& row, const Vec2& outward) {
  const Vec2 left{-row.dir.y, row.dir.x};
  return outward.dot(left) > 0 ? RowSide::Left : RowSide::Right;
}

VisibilityGraph build_graph_impl(std::vector<RowGeom> rows,
                                 const GraphParams& params) {
  params.validate();
  if (rows.empty()) throw ConfigError("build_graph: no rows");

  Builder b;
  b.graph.params = params;

  // Terminal ends of each lane, grouped per corridor and physical end so
  // U-turn and corridor-switch edges can be wired afterwards.
  struct CorridorEnds {
    // [end 0 = t_min side, end 1 = t_max side]
    std::vector<int> arrivals[2];
    std::vector<int> entries[2];
    int row_a = -1, row_b = -1;
  };
  std::vector<CorridorEnds> ends;

  if (rows.size() == 1) {
    // Single row: antiparallel lanes on both sides form one loop.
    const RowGeom& row = rows[0];
    const double offset = params.lane_offset > 0
                              ? params.lane_offset
                              : row.canopy_radius + std::max(params.clearance_min, 1.0);
    double t_lo = std::numeric_limits<double>::infinity();
    double t_hi = -std::numeric_limits<double>::infinity();
    for (const auto& c : row.centers) {
      t_lo = std::min(t_lo, c.dot(row.dir));
      t_hi = std::max(t_hi, c.dot(row.dir));
    }
    t_lo -= params.end_extension;
    t_hi += params.end_extension;

    CorridorInfo info;
    info.row_a = 0;
    info.row_b = -1;
    info.dir_x = row.dir.x;
    info.dir_y = row.dir.y;
    info.t_min = t_lo + params.end_extension;
    info.t_max = t_hi - params.end_extension;
    info.width = 2 * offset;
    b.graph.corridors.push_back(info);

    const Vec2 base = row.normal * row.rho;
    LaneSpec plus;   // +normal side, travels +dir
    plus.row = 0;
    plus.corridor = 0;
    plus.dir = row.dir;
    plus.line_point = base + row.normal * offset;
    plus.t_entry = t_lo;
    plus.t_exit = t_hi;
    plus.side = side_of(row, row.normal);
    plus.geom = &row;

    LaneSpec minus;  // -normal side, travels -dir
    minus.row = 0;
    minus.corridor = 0;
    minus.dir = row.dir * -1.0;
    minus.line_point = base - row.normal * offset;
    minus.t_entry = -t_hi;  // projections onto -dir
    minus.t_exit = -t_lo;
    minus.side = side_of(row, row.normal * -1.0);
    minus.geom = &row;

    const LaneNodes lp = emit_lane(b, plus);
    const LaneNodes lm = emit_lane(b, minus);
    CorridorEnds ce;
    ce.row_a = 0;
    ce.arrivals[1].push_back(lp.exit);   // +dir lane arrives at the t_max end
    ce.entries[1].push_back(lm.entry);   // -dir lane starts there
    ce.arrivals[0].push_back(lm.exit);
    ce.entries[0].push_back(lp.entry);
    ends.push_back(ce);
  } else {
    // Sort rows across the mean normal so adjacency means spatial adjacency.
    Vec2 mean_dir;
    for (const auto& r : rows) mean_dir = mean_dir + r.dir;
    mean_dir = mean_dir * (1.0 / mean_dir.norm());
    const Vec2 mean_normal{-mean_dir.y, mean_dir.x};
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
      return rows[a].centroid.dot(mean_normal) < rows[c].centroid.dot(mean_normal);
    });

    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      const std::size_t ia = order[k], ib = order[k + 1];
      const RowGeom& ra = rows[ia];
      const RowGeom& rb = rows[ib];

      // Perpendicular separation of the two row lines, measured at the
      // second row's centroid.
      const double line_dist =
          std::abs(rb.centroid.dot(ra.normal) - ra.rho);
      const double width = line_dist - ra.canopy_radius - rb.canopy_radius;
      if (width < 2 * params.clearance_min) {
        std::ostringstream os;
        os << "corridor between rows " << ia << " and " << ib
           << " omitted: free width " << width << " m < "
           << 2 * params.clearance_min << " m";
        b.graph.warnings.push_back(os.str());
        continue;
      }

      const int corridor = static_cast<int>(b.graph.corridors.size());
      Vec2 dir = ra.dir + rb.dir;
      dir = dir * (1.0 / dir.norm());

      const double off_a =
          params.lane_offset > 0 ? params.lane_offset : ra.canopy_radius + width / 4;
      const double off_b =
          params.lane_offset > 0 ? params.lane_offset : rb.canopy_radius + width / 4;
      // Outward normals pointing into the corridor.
      Vec2 na = ra.normal;
      if (na.dot(rb.centroid - ra.centroid) < 0) na = na * -1.0;
      Vec2 nb = rb.normal;
      if (nb.dot(ra.centroid - rb.centroid) < 0) nb = nb * -1.0;

      double t_lo = std::numeric_limits<double>::infinity();
      double t_hi = -std::numeric_limits<double>::infinity();
      for (const RowGeom* r : {&ra, &rb}) {
        for (const auto& c : r->centers) {
          t_lo = std::min(t_lo, c.dot(dir));
          t_hi = std::max(t_hi, c.dot(dir));
        }
      }

      CorridorInfo info;
      info.row_a = static_cast<int>(ia);
      info.row_b = static_cast<int>(ib);
      info.dir_x = dir.x;
      info.dir_y = dir.y;
      info.t_min = t_lo;
      info.t_max = t_hi;
      info.width = width;
      b.graph.corridors.push_back(info);

      // The lane nearer the lower sorted row runs in +dir.
      LaneSpec low;
      low.row = static_cast<int>(ia);
      low.corridor = corridor;
      low.dir = dir;
      low.line_point = ra.normal * ra.rho + na * off_a;
      low.t_entry = t_lo - params.end_extension;
      low.t_exit = t_hi + params.end_extension;
      low.side = side_of(ra, na);
      low.geom = &ra;

      LaneSpec high;
      high.row = static_cast<int>(ib);
      high.corridor = corridor;
      high.dir = dir * -1.0;
      high.line_point = rb.normal * rb.rho + nb * off_b;
      high.t_entry = -(t_hi + params.end_extension);
      high.t_exit = -(t_lo - params.end_extension);
      high.side = side_of(rb, nb);
      high.geom = &rb;

      const LaneNodes ln_low = emit_lane(b, low);
      const LaneNodes ln_high = emit_lane(b, high);
      CorridorEnds ce;
      ce.row_a = static_cast<int>(ia);
      ce.row_b = static_cast<int>(ib);
      ce.arrivals[1].push_back(ln_low.exit);
      ce.entries[1].push_back(ln_high.entry);
      ce.arrivals[0].push_back(ln_high.exit);
      ce.entries[0].push_back(ln_low.entry);
      ends.push_back(ce);
    }
    if (b.graph.corridors.empty())
      throw ConfigError("build_graph: no usable corridors");
  }

  // U-turns within a corridor and switches between corridors sharing a row,
  // both only through the open end areas.
  auto connect_ends = [&](const CorridorEnds& from, const CorridorEnds& to,
                          int corridor_tag) {
    for (int end = 0; end < 2; ++end) {
      for (int a : from.arrivals[end]) {
        for (int e : to.entries[end]) {
          b.add_edge(a, e, EdgeKind::Turn, b.graph.nodes[e].heading, corridor_tag);
        }
      }
    }
  };
  for (std::size_t c = 0; c < ends.size(); ++c)
    connect_ends(ends[c], ends[c], static_cast<int>(c));
  for (std::size_t c = 0; c < ends.size(); ++c) {
    for (std::size_t d = c + 1; d < ends.size(); ++d) {
      const bool adjacent = ends[c].row_a == ends[d].row_a ||
                            ends[c].row_a == ends[d].row_b ||
                            ends[c].row_b == ends[d].row_a ||
                            (ends[c].row_b >= 0 && ends[c].row_b == ends[d].row_b);
      if (!adjacent) continue;
      connect_ends(ends[c], ends[d], -1);
      connect_ends(ends[d], ends[c], -1);
    }
  }

  b.graph.rebuild_adjacency();
  return b.graph;
}

}  // namespace

void VisibilityGraph::rebuild_adjacency() {
  adjacency_.assign(nodes.size(), {});
  for (std::size_t i = 0; i < edges.size(); ++i)
    adjacency_[edges[i].from].push_back(static_cast<int>(i));
}

VisibilityGraph build_graph(const std::vector<TreeRow>& rows,
                            const std::vector<Detection>& trees,
                            const GraphParams& params) {
  if (rows.empty()) throw ConfigError("build_graph: no rows");
  std::vector<RowGeom> geoms;
  geoms.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<Vec2> centers;
    std::vector<int> refs;
    double radius_sum = 0;
    for (std::size_t t : row.member_trees) {
      if (t >= trees.size()) throw ConfigError("build_graph: row member out of range");
      const Box2D& box = trees[t].box;
      centers.push_back({box.center_x(), box.center_y()});
      refs.push_back(static_cast<int>(t));
      radius_sum += (box.width() + box.height()) / 4.0;
    }
    if (centers.empty()) throw ConfigError("build_graph: empty row");
    geoms.push_back(make_row_geom(row.theta, row.rho, std::move(centers),
                                  std::move(refs), radius_sum / row.member_trees.size()));
  }
  return build_graph_impl(std::move(geoms), params);
}

VisibilityGraph build_graph_from_centers(
    const std::vector<std::vector<std::array<double, 2>>>& rows_of_centers,
    const GraphParams& params) {
  std::vector<RowGeom> geoms;
  int next_ref = 0;
  for (const auto& row : rows_of_centers) {
    if (row.size() < 2)
      throw ConfigError("build_graph_from_centers: each row needs >= 2 centers");
    std::vector<Vec2> centers;
    std::vector<int> refs;
    for (const auto& c : row) {
      centers.push_back({c[0], c[1]});
      refs.push_back(next_ref++);
    }
    // Fit the row line the same way detected rows are fitted.
    double mx = 0, my = 0;
    for (const auto& c : centers) {
      mx += c.x;
      my += c.y;
    }
    mx /= centers.size();
    my /= centers.size();
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& c : centers) {
      const double dx = c.x - mx, dy = c.y - my;
      sxx += dx * dx;
      sxy += dx * dy;
      syy += dy * dy;
    }
    const double dir = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    double theta = dir + std::numbers::pi / 2.0;
    while (theta < 0) theta += std::numbers::pi;
    while (theta >= std::numbers::pi) theta -= std::numbers::pi;
    const double rho = mx * std::cos(theta) + my * std::sin(theta);
    geoms.push_back(make_row_geom(theta, rho, std::move(centers), std::move(refs), 0.0));
  }
  return build_graph_impl(std::move(geoms), params);
}

Path plan_path(const VisibilityGraph& graph, const PlanRequest& request) {
  const GraphParams& p = graph.params;
  auto snap = [&](double x, double y, double heading, const char* what) -> int {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& n : graph.nodes) {
      if (heading_diff(n.heading, heading) > p.heading_tolerance) continue;
      const double d = std::hypot(n.x - x, n.y - y);
      if (d > p.snap_radius) continue;
      if (d < best_dist) {
        best_dist = d;
        best = n.id;
      }
    }
    if (best < 0) {
      std::ostringstream os;
      os << what << " pose (" << x << "," << y << "," << heading
         << ") has no graph node within " << p.snap_radius
         << " m matching its heading";
      throw PlanError(PlanError::Kind::OffGraph, os.str());
    }
    return best;
  };

  const int start = snap(request.start_x, request.start_y, request.start_heading,
                         "start");
  const int goal = snap(request.goal_x, request.goal_y, request.goal_heading,
                        "goal");

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(graph.nodes.size(), inf);
  std::vector<int> parent_edge(graph.nodes.size(), -1);
  using Item = std::pair<double, int>;  // (distance, node id): id breaks ties
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[start] = 0;
  pq.emplace(0.0, start);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    if (u == goal) break;
    for (int ei : graph.out_edges(u)) {
      const CorridorEdge& e = graph.edges[ei];
      const double nd = d + e.length;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        parent_edge[e.to] = ei;
        pq.emplace(nd, e.to);
      }
    }
  }
  if (dist[goal] == inf)
    throw PlanError(PlanError::Kind::Unreachable,
                    "no directed path from node " + std::to_string(start) +
                        " to node " + std::to_string(goal));

  Path path;
  path.length = dist[goal];
  std::vector<int> rev_edges;
  for (int v = goal; v != start;) {
    const int ei = parent_edge[v];
    rev_edges.push_back(ei);
    v = graph.edges[ei].from;
  }
  path.node_ids.push_back(start);
  for (auto it = rev_edges.rbegin(); it != rev_edges.rend(); ++it) {
    path.node_ids.push_back(graph.edges[*it].to);
    path.segment_headings.push_back(graph.edges[*it].heading);
  }
  return path;
}

namespace {

const char* kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::TreeAccess: return "tree_access";
    case NodeKind::RowEnd: return "row_end";
    case NodeKind::UTurn: return "uturn";
  }
  return "?";
}

NodeKind kind_from(const std::string& s) {
  if (s == "tree_access") return NodeKind::TreeAccess;
  if (s == "row_end") return NodeKind::RowEnd;
  if (s == "uturn") return NodeKind::UTurn;
  throw IoError("unknown node kind '" + s + "'");
}

}  // namespace

std::string graph_to_json(const VisibilityGraph& graph) {
  json j;
  json params;
  params["lane_offset"] = graph.params.lane_offset;
  params["end_extension"] = graph.params.end_extension;
  params["heading_tolerance"] = graph.params.heading_tolerance;
  params["clearance_min"] = graph.params.clearance_min;
  params["snap_radius"] = graph.params.snap_radius;
  j["params"] = params;

  json nodes = json::array();
  for (const auto& n : graph.nodes) {
    json jn;
    jn["id"] = n.id;
    jn["x"] = n.x;
    jn["y"] = n.y;
    jn["heading"] = n.heading;
    jn["kind"] = kind_name(n.kind);
    jn["tree_ref"] = n.tree_ref;
    jn["row_ref"] = n.row_ref;
    jn["corridor_ref"] = n.corridor_ref;
    jn["side"] = n.side == RowSide::Left ? "left" : "right";
    nodes.push_back(jn);
  }
  j["nodes"] = nodes;

  json edges = json::array();
  for (const auto& e : graph.edges) {
    json je;
    je["from"] = e.from;
    je["to"] = e.to;
    je["length"] = e.length;
    je["kind"] = e.kind == EdgeKind::Lane ? "lane" : "turn";
    je["heading"] = e.heading;
    je["corridor_ref"] = e.corridor_ref;
    edges.push_back(je);
  }
  j["edges"] = edges;

  json corridors = json::array();
  for (const auto& c : graph.corridors) {
    json jc;
    jc["row_a"] = c.row_a;
    jc["row_b"] = c.row_b;
    jc["dir"] = json::array({c.dir_x, c.dir_y});
    jc["t_min"] = c.t_min;
    jc["t_max"] = c.t_max;
    jc["width"] = c.width;
    corridors.push_back(jc);
  }
  j["corridors"] = corridors;
  j["warnings"] = graph.warnings;
  return j.dump(2);
}

VisibilityGraph graph_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("graph JSON parse error: ") + e.what());
  }
  VisibilityGraph g;
  if (j.contains("params")) {
    const auto& p = j["params"];
    g.params.lane_offset = p.value("lane_offset", g.params.lane_offset);
    g.params.end_extension = p.value("end_extension", g.params.end_extension);
    g.params.heading_tolerance =
        p.value("heading_tolerance", g.params.heading_tolerance);
    g.params.clearance_min = p.value("clearance_min", g.params.clearance_min);
    g.params.snap_radius = p.value("snap_radius", g.params.snap_radius);
  }
  for (const auto& jn : j.at("nodes")) {
    AccessNode n;
    n.id = jn.at("id").get<int>();
    n.x = jn.at("x").get<double>();
    n.y = jn.at("y").get<double>();
    n.heading = jn.at("heading").get<double>();
    n.kind = kind_from(jn.at("kind").get<std::string>());
    n.tree_ref = jn.value("tree_ref", -1);
    n.row_ref = jn.value("row_ref", -1);
    n.corridor_ref = jn.value("corridor_ref", -1);
    n.side = jn.value("side", "left") == std::string("left") ? RowSide::Left
                                                             : RowSide::Right;
    if (n.id != static_cast<int>(g.nodes.size()))
      throw IoError("graph JSON: node ids must be dense and ordered");
    g.nodes.push_back(n);
  }
  for (const auto& je : j.at("edges")) {
    CorridorEdge e;
    e.from = je.at("from").get<int>();
    e.to = je.at("to").get<int>();
    if (e.from < 0 || e.to < 0 || e.from >= static_cast<int>(g.nodes.size()) ||
        e.to >= static_cast<int>(g.nodes.size()))
      throw IoError("graph JSON: edge endpoint out of range");
    e.length = je.at("length").get<double>();
    e.kind = je.value("kind", "lane") == std::string("turn") ? EdgeKind::Turn
                                                             : EdgeKind::Lane;
    e.heading = je.value("heading", 0.0);
    e.corridor_ref = je.value("corridor_ref", -1);
    g.edges.push_back(e);
  }
  if (j.contains("corridors")) {
    for (const auto& jc : j["corridors"]) {
      CorridorInfo c;
      c.row_a = jc.value("row_a", -1);
      c.row_b = jc.value("row_b", -1);
      if (jc.contains("dir")) {
        c.dir_x = jc["dir"][0].get<double>();
        c.dir_y = jc["dir"][1].get<double>();
      }
      c.t_min = jc.value("t_min", 0.0);
      c.t_max = jc.value("t_max", 0.0);
      c.width = jc.value("width", 0.0);
      g.corridors.push_back(c);
    }
  }
  g.rebuild_adjacency();
  return g;
}

void save_graph(const VisibilityGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << graph_to_json(graph) << "\n";
}

VisibilityGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return graph_from_json(ss.str());
}

void save_path(const VisibilityGraph& graph, const Path& path,
               const std::string& json_path) {
  json j;
  j["nodes"] = path.node_ids;
  j["length"] = path.length;
  j["segment_headings"] = path.segment_headings;
  json poly = json::array();
  for (int id : path.node_ids) {
    const auto& n = graph.nodes[id];
    poly.push_back(json::array({n.x, n.y, n.heading}));
  }
  j["polyline"] = poly;
  std::ofstream out(json_path);
  if (!out) throw IoError(json_path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

}  // namespace orchard
