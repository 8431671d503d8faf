#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wcl/geometry.hpp"
#include "wcl/rng.hpp"

namespace wcl {

using NodeId = std::size_t;

struct Disk {
  double radius = 0.0;
};

struct Square {
  double half_side = 0.0;
};

using Area = std::variant<Disk, Square>;

double area_measure(const Area& area);
bool contains(const Area& area, Point2 p, double slack = 1e-9);
/// Distance from `p` to the nearest boundary of the area (0 outside).
double edge_distance(const Area& area, Point2 p);

enum class PlacementKind { fixed_grid, random_grid, uniform_disk, uniform_square };

const char* to_string(PlacementKind kind);
PlacementKind placement_kind_from_string(const std::string& name);

/// Sensor layout for one localization round. `true_positions` drive the
/// channel; `measured_positions` are what the nodes believe and report.
struct Deployment {
  std::vector<Point2> true_positions;
  std::vector<Point2> measured_positions;
  Point2 pu;
  Area area = Disk{};
  double sigma_l = 0.0;
  PlacementKind kind = PlacementKind::fixed_grid;
  double grid_spacing = 0.0;  // lattice pitch; 0 for non-lattice placements

  std::size_t size() const { return true_positions.size(); }
};

// Square lattice at half-integer offsets, clipped to the disk of radius R.
// The realized count is the largest count <= n_target reachable by scaling
// the lattice; the PU sits at the origin.
Deployment place_fixed_grid(double radius, std::size_t n_target);

// floor(sqrt(n_target))^2 lattice filling the square [-h, h]^2.
Deployment place_fixed_grid_square(double half_side, std::size_t n_target);

Deployment place_uniform_disk(double radius, std::size_t n, Rng& rng);
Deployment place_uniform_square(double half_side, std::size_t n, Rng& rng);

// Same lattice as place_fixed_grid with the PU uniform in the central cell.
Deployment place_random_grid(double radius, std::size_t n_target, Rng& rng);
Deployment place_random_grid_square(double half_side, std::size_t n_target, Rng& rng);

Deployment apply_position_noise(Deployment dep, double sigma_l, Rng& rng);

/// sqrt(area / N); equals the pitch of a square lattice filling a square.
double average_node_spacing(const Deployment& dep);
double average_node_spacing(const Area& area, std::size_t n);

/// Declarative description of a deployment, used by the harness and theory
/// averaging to regenerate placements per trial.
struct DeploymentSpec {
  PlacementKind kind = PlacementKind::fixed_grid;
  bool square_area = false;
  double radius = 100.0;     // disk radius, or square half-side when square_area
  std::size_t n = 100;
  double sigma_l = 0.0;
  // Unset: origin for grids and disks; uniform over the area when pu_uniform.
  std::optional<Point2> pu;
  bool pu_uniform = false;

  Area area() const;
  bool is_random() const;
};

// Positions are drawn from `rng`; self-localization noise is applied last.
Deployment make_deployment(const DeploymentSpec& spec, Rng& rng);

void write_deployment_csv(std::ostream& os, const Deployment& dep);

}  // namespace wcl
