#include "wcl/placement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>

#include "wcl/error.hpp"

namespace wcl {

double area_measure(const Area& area) {
  if (const auto* d = std::get_if<Disk>(&area)) return std::numbers::pi * d->radius * d->radius;
  const auto& s = std::get<Square>(area);
  return 4.0 * s.half_side * s.half_side;
}

bool contains(const Area& area, Point2 p, double slack) {
  if (const auto* d = std::get_if<Disk>(&area)) return norm(p) <= d->radius * (1.0 + slack);
  const auto& s = std::get<Square>(area);
  const double h = s.half_side * (1.0 + slack);
  return std::abs(p.x) <= h && std::abs(p.y) <= h;
}

double edge_distance(const Area& area, Point2 p) {
  double e;
  if (const auto* d = std::get_if<Disk>(&area)) {
    e = d->radius - norm(p);
  } else {
    const double h = std::get<Square>(area).half_side;
    e = std::min(h - std::abs(p.x), h - std::abs(p.y));
  }
  return std::max(e, 0.0);
}

const char* to_string(PlacementKind kind) {
  switch (kind) {
    case PlacementKind::fixed_grid: return "fixed_grid";
    case PlacementKind::random_grid: return "random_grid";
    case PlacementKind::uniform_disk: return "uniform_disk";
    case PlacementKind::uniform_square: return "uniform_square";
  }
  return "unknown";
}

PlacementKind placement_kind_from_string(const std::string& name) {
  if (name == "fixed_grid") return PlacementKind::fixed_grid;
  if (name == "random_grid") return PlacementKind::random_grid;
  if (name == "uniform_disk" || name == "uniform") return PlacementKind::uniform_disk;
  if (name == "uniform_square") return PlacementKind::uniform_square;
  throw Error(ErrorCode::config, "unknown placement '" + name + "'");
}

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + " must be positive and finite");
  }
}

struct LatticeLayout {
  double spacing;
  std::vector<Point2> points;
};

// Half-offset lattice points (i+1/2, j+1/2) have squared norm k = (2i+1)^2/4 +
// (2j+1)^2/4. A lattice of pitch g keeps exactly the points with k <= (R/g)^2,
// so the reachable counts are cumulative counts over the sorted distinct k.
LatticeLayout disk_lattice(double radius, std::size_t n_target) {
  require_positive(radius, "radius");
  if (n_target < 4) throw Error(ErrorCode::invalid_argument, "fixed grid needs N_target >= 4");

  const long half = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n_target)))) + 2;
  // Squared norms in units of 1/4 stay integral: (2i+1)^2 + (2j+1)^2.
  std::map<long, std::vector<std::pair<long, long>>> shells;
  for (long i = -half; i < half; ++i) {
    for (long j = -half; j < half; ++j) {
      const long k4 = (2 * i + 1) * (2 * i + 1) + (2 * j + 1) * (2 * j + 1);
      shells[k4].emplace_back(i, j);
    }
  }
  // The enumeration window is complete for every shell with k4 <= (2*half-1)^2.
  const long complete = (2 * half - 1) * (2 * half - 1);

  std::size_t count = 0;
  long chosen = -1;
  long next = -1;
  for (const auto& [k4, pts] : shells) {
    if (k4 > complete) break;
    if (count + pts.size() > n_target) {
      next = k4;
      break;
    }
    count += pts.size();
    chosen = k4;
  }
  if (next < 0) throw Error(ErrorCode::invalid_argument, "lattice enumeration window too small");

  // Pitch g keeps shell `chosen` and drops shell `next` iff
  // R/sqrt(next/4) < g <= R/sqrt(chosen/4). Aim for g ~ sqrt(area/N) so the
  // pitch matches the normalization spacing, clamped away from both ends.
  const double g_hi = radius / std::sqrt(chosen / 4.0);
  const double g_lo = radius / std::sqrt(next / 4.0);
  const double margin = 0.02 * (g_hi - g_lo);
  const double target = std::sqrt(std::numbers::pi * radius * radius / static_cast<double>(count));
  const double g = std::clamp(target, g_lo + margin, g_hi - margin);

  LatticeLayout out{g, {}};
  out.points.reserve(count);
  for (const auto& [k4, pts] : shells) {
    if (k4 > chosen) break;
    for (auto [i, j] : pts) out.points.push_back({(i + 0.5) * g, (j + 0.5) * g});
  }
  // Row-major order (descending y, ascending x) makes ids readable in CSV.
  std::sort(out.points.begin(), out.points.end(), [](Point2 a, Point2 b) {
    return a.y != b.y ? a.y > b.y : a.x < b.x;
  });
  return out;
}

LatticeLayout square_lattice(double half_side, std::size_t n_target) {
  require_positive(half_side, "half_side");
  if (n_target < 4) throw Error(ErrorCode::invalid_argument, "fixed grid needs N_target >= 4");
  const auto side = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_target)) + 1e-9));
  const double g = 2.0 * half_side / static_cast<double>(side);
  LatticeLayout out{g, {}};
  out.points.reserve(side * side);
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      out.points.push_back({-half_side + (c + 0.5) * g, half_side - (r + 0.5) * g});
    }
  }
  return out;
}

Deployment from_points(std::vector<Point2> pts, Area area, PlacementKind kind, double spacing) {
  Deployment dep;
  dep.measured_positions = pts;
  dep.true_positions = std::move(pts);
  dep.area = area;
  dep.kind = kind;
  dep.grid_spacing = spacing;
  return dep;
}

}  // namespace

Deployment place_fixed_grid(double radius, std::size_t n_target) {
  auto lattice = disk_lattice(radius, n_target);
  return from_points(std::move(lattice.points), Disk{radius}, PlacementKind::fixed_grid, lattice.spacing);
}

Deployment place_fixed_grid_square(double half_side, std::size_t n_target) {
  auto lattice = square_lattice(half_side, n_target);
  return from_points(std::move(lattice.points), Square{half_side}, PlacementKind::fixed_grid,
                     lattice.spacing);
}

Deployment place_uniform_disk(double radius, std::size_t n, Rng& rng) {
  require_positive(radius, "radius");
  if (n < 1) throw Error(ErrorCode::invalid_argument, "uniform placement needs N >= 1");
  std::vector<Point2> pts(n);
  for (auto& p : pts) {
    const double r = radius * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    p = {r * std::cos(theta), r * std::sin(theta)};
  }
  return from_points(std::move(pts), Disk{radius}, PlacementKind::uniform_disk, 0.0);
}

Deployment place_uniform_square(double half_side, std::size_t n, Rng& rng) {
  require_positive(half_side, "half_side");
  if (n < 1) throw Error(ErrorCode::invalid_argument, "uniform placement needs N >= 1");
  std::vector<Point2> pts(n);
  for (auto& p : pts) p = {rng.uniform(-half_side, half_side), rng.uniform(-half_side, half_side)};
  return from_points(std::move(pts), Square{half_side}, PlacementKind::uniform_square, 0.0);
}

Deployment place_random_grid(double radius, std::size_t n_target, Rng& rng) {
  auto dep = place_fixed_grid(radius, n_target);
  dep.kind = PlacementKind::random_grid;
  const double h = 0.5 * dep.grid_spacing;
  dep.pu = {rng.uniform(-h, h), rng.uniform(-h, h)};
  return dep;
}

Deployment place_random_grid_square(double half_side, std::size_t n_target, Rng& rng) {
  auto dep = place_fixed_grid_square(half_side, n_target);
  dep.kind = PlacementKind::random_grid;
  const double h = 0.5 * dep.grid_spacing;
  dep.pu = {rng.uniform(-h, h), rng.uniform(-h, h)};
  return dep;
}

Deployment apply_position_noise(Deployment dep, double sigma_l, Rng& rng) {
  if (!(sigma_l >= 0.0)) throw Error(ErrorCode::invalid_argument, "sigma_l must be >= 0");
  dep.sigma_l = sigma_l;
  if (sigma_l == 0.0) {
    dep.measured_positions = dep.true_positions;
    return dep;
  }
  dep.measured_positions.resize(dep.true_positions.size());
  for (std::size_t i = 0; i < dep.size(); ++i) {
    const double dx = rng.normal(0.0, sigma_l);
    const double dy = rng.normal(0.0, sigma_l);
    dep.measured_positions[i] = dep.true_positions[i] + Point2{dx, dy};
  }
  return dep;
}

double average_node_spacing(const Area& area, std::size_t n) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "average node spacing needs N >= 2");
  return std::sqrt(area_measure(area) / static_cast<double>(n));
}

double average_node_spacing(const Deployment& dep) { return average_node_spacing(dep.area, dep.size()); }

Area DeploymentSpec::area() const {
  if (square_area) return Square{radius};
  return Disk{radius};
}

bool DeploymentSpec::is_random() const {
  return kind != PlacementKind::fixed_grid || pu_uniform || sigma_l > 0.0;
}

Deployment make_deployment(const DeploymentSpec& spec, Rng& rng) {
  Rng place_rng = rng.derive(1);
  Rng noise_rng = rng.derive(2);
  Rng pu_rng = rng.derive(3);
  Deployment dep;
  switch (spec.kind) {
    case PlacementKind::fixed_grid:
      dep = spec.square_area ? place_fixed_grid_square(spec.radius, spec.n)
                             : place_fixed_grid(spec.radius, spec.n);
      break;
    case PlacementKind::random_grid:
      dep = spec.square_area ? place_random_grid_square(spec.radius, spec.n, place_rng)
                             : place_random_grid(spec.radius, spec.n, place_rng);
      break;
    case PlacementKind::uniform_disk:
      dep = spec.square_area ? place_uniform_square(spec.radius, spec.n, place_rng)
                             : place_uniform_disk(spec.radius, spec.n, place_rng);
      break;
    case PlacementKind::uniform_square:
      dep = place_uniform_square(spec.radius, spec.n, place_rng);
      break;
  }
  if (spec.pu) {
    dep.pu = *spec.pu;
  } else if (spec.pu_uniform) {
    if (std::holds_alternative<Square>(dep.area)) {
      const double h = std::get<Square>(dep.area).half_side;
      dep.pu = {pu_rng.uniform(-h, h), pu_rng.uniform(-h, h)};
    } else {
      const double r = std::get<Disk>(dep.area).radius * std::sqrt(pu_rng.uniform());
      const double t = 2.0 * std::numbers::pi * pu_rng.uniform();
      dep.pu = {r * std::cos(t), r * std::sin(t)};
    }
  }
  return apply_position_noise(std::move(dep), spec.sigma_l, noise_rng);
}

void write_deployment_csv(std::ostream& os, const Deployment& dep) {
  const auto old_precision = os.precision(12);
  os << "id,true_x,true_y,meas_x,meas_y\n";
  for (std::size_t i = 0; i < dep.size(); ++i) {
    const auto& t = dep.true_positions[i];
    const auto& m = dep.measured_positions[i];
    os << i << ',' << t.x << ',' << t.y << ',' << m.x << ',' << m.y << '\n';
  }
  os.precision(old_precision);
}

}  // namespace wcl
