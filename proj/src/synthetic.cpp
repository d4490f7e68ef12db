#include "orchardnav/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "orchardnav/rng.hpp"

namespace orchard {

using json = nlohmann::ordered_json;

double TerrainProfile::height_at(double x, double y) const {
  switch (kind) {
    case TerrainKind::Flat: return 0.0;
    case TerrainKind::Slope: return grade * x;
    case TerrainKind::Rolling: {
      const double w = 2.0 * std::numbers::pi / wavelength;
      return amplitude * std::sin(w * x) * std::sin(w * y);
    }
  }
  return 0.0;
}

void OrchardSpec::validate() const {
  std::vector<std::string> problems;
  if (rows < 1) problems.push_back("rows must be >= 1");
  if (trees_per_row < 1) problems.push_back("trees_per_row must be >= 1");
  if (!(tree_spacing > 2 * canopy_radius))
    problems.push_back("tree_spacing must exceed twice the canopy radius");
  if (rows > 1 && !(row_spacing > 2 * canopy_radius))
    problems.push_back("row_spacing must exceed twice the canopy radius");
  if (!(trunk_height > 0)) problems.push_back("trunk_height must be > 0");
  if (!(trunk_radius > 0)) problems.push_back("trunk_radius must be > 0");
  if (!(canopy_radius > 0)) problems.push_back("canopy_radius must be > 0");
  if (!(canopy_height > 0)) problems.push_back("canopy_height must be > 0");
  if (!(point_density > 0)) problems.push_back("point_density must be > 0");
  if (noise_sigma < 0) problems.push_back("noise_sigma must be >= 0");
  if (!(margin > 0)) problems.push_back("margin must be > 0");
  if (!(canopy_density_factor > 0))
    problems.push_back("canopy_density_factor must be > 0");
  if (!(trunk_density_factor > 0))
    problems.push_back("trunk_density_factor must be > 0");
  if (ground.kind == TerrainKind::Rolling && !(ground.wavelength > 0))
    problems.push_back("rolling wavelength must be > 0");
  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid orchard spec:";
    for (const auto& p : problems) os << "\n  - " << p;
    throw ConfigError(os.str());
  }
}

namespace {

constexpr std::uint64_t kGroundStream = 0;

std::uint64_t tree_stream(int row, int col) {
  return 0x100000000ULL + (static_cast<std::uint64_t>(row) << 20) +
         static_cast<std::uint64_t>(col) + 1;
}

}  // namespace

std::pair<PointCloudMap, GroundTruth> generate(const OrchardSpec& spec) {
  spec.validate();

  const double x_lo = -spec.margin;
  const double x_hi = (spec.trees_per_row - 1) * spec.tree_spacing + spec.margin;
  const double y_lo = -spec.margin;
  const double y_hi = (spec.rows - 1) * spec.row_spacing + spec.margin;
  const double area = (x_hi - x_lo) * (y_hi - y_lo);

  std::vector<Point3> points;
  GroundTruth truth;

  const auto n_ground =
      static_cast<std::size_t>(std::llround(spec.point_density * area));
  points.reserve(n_ground);
  {
    Xoshiro256ss rng(spec.seed, kGroundStream);
    for (std::size_t i = 0; i < n_ground; ++i) {
      const double x = rng.uniform(x_lo, x_hi);
      const double y = rng.uniform(y_lo, y_hi);
      const double z =
          spec.ground.height_at(x, y) + rng.gaussian_clipped(spec.noise_sigma);
      points.emplace_back(x, y, z);
      truth.ground_indices.push_back(i);
      truth.point_source.push_back(-1);
    }
  }

  const double trunk_area = std::numbers::pi * spec.trunk_radius * spec.trunk_radius;
  const double canopy_area = std::numbers::pi * spec.canopy_radius * spec.canopy_radius;
  const auto n_trunk = static_cast<std::size_t>(
      std::llround(spec.trunk_density_factor * spec.point_density * trunk_area));
  const auto n_canopy = static_cast<std::size_t>(
      std::llround(spec.canopy_density_factor * spec.point_density * canopy_area));

  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.trees_per_row; ++c) {
      const int tree_idx = r * spec.trees_per_row + c;
      const double tx = c * spec.tree_spacing;
      const double ty = r * spec.row_spacing;
      const double z0 = spec.ground.height_at(tx, ty);
      Xoshiro256ss rng(spec.seed, tree_stream(r, c));

      double bx_lo = tx, bx_hi = tx, by_lo = ty, by_hi = ty;
      double bz_lo = z0 + spec.trunk_height, bz_hi = z0;
      auto emit = [&](double x, double y, double z) {
        x += rng.gaussian_clipped(spec.noise_sigma);
        y += rng.gaussian_clipped(spec.noise_sigma);
        z += rng.gaussian_clipped(spec.noise_sigma);
        points.emplace_back(x, y, z);
        truth.point_source.push_back(tree_idx);
        bx_lo = std::min(bx_lo, x);
        bx_hi = std::max(bx_hi, x);
        by_lo = std::min(by_lo, y);
        by_hi = std::max(by_hi, y);
        bz_lo = std::min(bz_lo, z);
        bz_hi = std::max(bz_hi, z);
      };

      for (std::size_t i = 0; i < n_trunk; ++i) {
        const double rad = spec.trunk_radius * std::sqrt(rng.uniform());
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double h = rng.uniform(0.0, spec.trunk_height);
        emit(tx + rad * std::cos(phi), ty + rad * std::sin(phi), z0 + h);
      }
      const double cz = z0 + spec.trunk_height + spec.canopy_height / 2.0;
      for (std::size_t i = 0; i < n_canopy; ++i) {
        // Uniform in the unit ball, then scaled by the semi-axes.
        double ux, uy, uz, norm;
        do {
          ux = rng.gaussian(1.0);
          uy = rng.gaussian(1.0);
          uz = rng.gaussian(1.0);
          norm = std::sqrt(ux * ux + uy * uy + uz * uz);
        } while (norm == 0.0);
        const double rad = std::cbrt(rng.uniform());
        emit(tx + spec.canopy_radius * rad * ux / norm,
             ty + spec.canopy_radius * rad * uy / norm,
             cz + (spec.canopy_height / 2.0) * rad * uz / norm);
      }

      // The exact bounds of the emitted points, so every tree point lies
      // inside its recorded box by construction.
      truth.tree_boxes.emplace_back(Box2D(bx_lo, by_lo, bx_hi, by_hi), bz_lo, bz_hi);
    }
  }

  return {PointCloudMap(std::move(points)), std::move(truth)};
}

namespace {

TerrainKind terrain_kind_from(const std::string& s) {
  if (s == "flat") return TerrainKind::Flat;
  if (s == "slope") return TerrainKind::Slope;
  if (s == "rolling") return TerrainKind::Rolling;
  throw ConfigError("unknown terrain kind '" + s + "'");
}

const char* terrain_kind_name(TerrainKind k) {
  switch (k) {
    case TerrainKind::Flat: return "flat";
    case TerrainKind::Slope: return "slope";
    case TerrainKind::Rolling: return "rolling";
  }
  return "?";
}

}  // namespace

OrchardSpec orchard_spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("orchard spec parse error: ") + e.what());
  }
  OrchardSpec spec;
  spec.rows = j.value("rows", spec.rows);
  spec.trees_per_row = j.value("trees_per_row", spec.trees_per_row);
  spec.row_spacing = j.value("row_spacing", spec.row_spacing);
  spec.tree_spacing = j.value("tree_spacing", spec.tree_spacing);
  spec.trunk_height = j.value("trunk_height", spec.trunk_height);
  spec.trunk_radius = j.value("trunk_radius", spec.trunk_radius);
  spec.canopy_radius = j.value("canopy_radius", spec.canopy_radius);
  spec.canopy_height = j.value("canopy_height", spec.canopy_height);
  spec.point_density = j.value("point_density", spec.point_density);
  spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
  spec.seed = j.value("seed", spec.seed);
  spec.margin = j.value("margin", spec.margin);
  spec.canopy_density_factor =
      j.value("canopy_density_factor", spec.canopy_density_factor);
  spec.trunk_density_factor =
      j.value("trunk_density_factor", spec.trunk_density_factor);
  if (j.contains("ground")) {
    const auto& g = j["ground"];
    spec.ground.kind = terrain_kind_from(g.value("kind", "flat"));
    spec.ground.grade = g.value("grade", 0.0);
    spec.ground.amplitude = g.value("amplitude", 0.0);
    spec.ground.wavelength = g.value("wavelength", 10.0);
  }
  return spec;
}

std::string orchard_spec_to_json(const OrchardSpec& spec) {
  json j;
  j["rows"] = spec.rows;
  j["trees_per_row"] = spec.trees_per_row;
  j["row_spacing"] = spec.row_spacing;
  j["tree_spacing"] = spec.tree_spacing;
  j["trunk_height"] = spec.trunk_height;
  j["trunk_radius"] = spec.trunk_radius;
  j["canopy_radius"] = spec.canopy_radius;
  j["canopy_height"] = spec.canopy_height;
  json g;
  g["kind"] = terrain_kind_name(spec.ground.kind);
  g["grade"] = spec.ground.grade;
  g["amplitude"] = spec.ground.amplitude;
  g["wavelength"] = spec.ground.wavelength;
  j["ground"] = g;
  j["point_density"] = spec.point_density;
  j["noise_sigma"] = spec.noise_sigma;
  j["seed"] = spec.seed;
  j["margin"] = spec.margin;
  j["canopy_density_factor"] = spec.canopy_density_factor;
  j["trunk_density_factor"] = spec.trunk_density_factor;
  return j.dump(2);
}

OrchardSpec load_orchard_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return orchard_spec_from_json(ss.str());
}

void save_ground_truth(const GroundTruth& truth, const std::string& path) {
  json j;
  json boxes = json::array();
  for (const auto& b : truth.tree_boxes) {
    json jb;
    jb["x_min"] = b.footprint.x_min;
    jb["y_min"] = b.footprint.y_min;
    jb["x_max"] = b.footprint.x_max;
    jb["y_max"] = b.footprint.y_max;
    jb["z_min"] = b.z_min;
    jb["z_max"] = b.z_max;
    boxes.push_back(jb);
  }
  j["tree_boxes"] = boxes;
  j["ground_indices"] = truth.ground_indices;
  j["point_source"] = truth.point_source;
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << j.dump() << "\n";
}

GroundTruth load_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw IoError(path + ": invalid JSON");
  GroundTruth truth;
  for (const auto& jb : j.at("tree_boxes")) {
    truth.tree_boxes.emplace_back(
        Box2D(jb.at("x_min").get<double>(), jb.at("y_min").get<double>(),
              jb.at("x_max").get<double>(), jb.at("y_max").get<double>()),
        jb.at("z_min").get<double>(), jb.at("z_max").get<double>());
  }
  for (const auto& g : j.at("ground_indices"))
    truth.ground_indices.push_back(g.get<std::size_t>());
  for (const auto& s : j.at("point_source"))
    truth.point_source.push_back(s.get<int>());
  return truth;
}

}  // namespace orchard
