#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "orchardnav/geometry.hpp"

namespace orchard {

enum class TerrainKind { Flat, Slope, Rolling };

struct TerrainProfile {
  TerrainKind kind = TerrainKind::Flat;
  double grade = 0.0;       // slope: dz/dx
  double amplitude = 0.0;   // rolling
  double wavelength = 10.0; // rolling

  double height_at(double x, double y) const;
};

/// Parameters of a generated orchard. The seed fully determines the output.
struct OrchardSpec {
  int rows = 3;
  int trees_per_row = 10;
  double row_spacing = 4.0;    // meters between rows
  double tree_spacing = 3.0;   // meters between trees along a row
  double trunk_height = 1.2;
  double trunk_radius = 0.15;
  double canopy_radius = 1.0;
  double canopy_height = 1.6;
  TerrainProfile ground;
  double point_density = 200.0;  // ground points per m^2
  double noise_sigma = 0.01;     // meters, clipped at 5 sigma
  std::uint64_t seed = 1;
  double margin = 2.0;  // ground extends this far beyond the outermost trunks
  // Densities of tree points relative to point_density, per m^2 of footprint.
  // Trunks are emitted dense enough that a trunk pillar clears the encoder's
  // default 100-point floor at the default 10 m / 128 resolution.
  double canopy_density_factor = 4.0;
  double trunk_density_factor = 400.0;

  void validate() const;
};

struct GroundTruth {
  std::vector<Box3D> tree_boxes;             // exact bounds of each tree's points
  std::vector<std::size_t> ground_indices;
  std::vector<int> point_source;             // -1 ground, else tree index
};

/// Deterministic orchard generator: terrain sampled at point_density over
/// the footprint, one dense trunk cylinder plus a canopy ellipsoid per tree,
/// with truth bookkeeping recorded per point.
std::pair<PointCloudMap, GroundTruth> generate(const OrchardSpec& spec);

OrchardSpec orchard_spec_from_json(const std::string& text);
std::string orchard_spec_to_json(const OrchardSpec& spec);
OrchardSpec load_orchard_spec(const std::string& path);

void save_ground_truth(const GroundTruth& truth, const std::string& path);
GroundTruth load_ground_truth(const std::string& path);

}  // namespace orchard
