//
// wingbem -- Quadrilateral surface meshes: wing lattice grid, refinement, test bodies.
//
#pragma once

#include "wingbem/geometry.hpp"
#include "wingbem/types.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wingbem {

enum class Region : std::uint8_t { leeward, windward, tip, wake };

const char* region_name(Region r);

/// Integer cell extent on the wing parameter lattice: i along u, j along v.
struct LogicalBox {
  std::int64_t i0 = 0, i1 = 0, j0 = 0, j1 = 0;
};

struct MeshVertex {
  Vec3 position;
  Vec2 param;
};

/**
 * Body cell. Vertices follow (xi,eta) = (0,0),(1,0),(1,1),(0,1) with xi along
 * v (chordwise) and eta along u (spanwise), so a_xi x a_eta points into the fluid.
 */
struct Cell {
  std::array<int, 4> vertices{};
  Region region = Region::leeward;
  int parent = -1;
  int level = 0;
  LogicalBox box;
};

/// Places new vertices and high-order support points on the true surface.
class SurfacePlacer {
 public:
  virtual ~SurfacePlacer() = default;
  virtual MeshVertex place(const Vec3& approx, const Vec2& hint) const = 0;
  /// Surface normal near param, approached from `toward`; nullopt when unknown.
  virtual std::optional<Vec3> normal_near(const Vec2& param, const Vec2& toward) const {
    (void)param;
    (void)toward;
    return std::nullopt;
  }
};

class WingPlacer : public SurfacePlacer {
 public:
  explicit WingPlacer(std::shared_ptr<const WingGeometry> wing) : wing_(std::move(wing)) {}
  MeshVertex place(const Vec3& approx, const Vec2& hint) const override;
  std::optional<Vec3> normal_near(const Vec2& param, const Vec2& toward) const override;

 private:
  std::shared_ptr<const WingGeometry> wing_;
};

class SpherePlacer : public SurfacePlacer {
 public:
  explicit SpherePlacer(double radius) : radius_(radius) {}
  MeshVertex place(const Vec3& approx, const Vec2& hint) const override;

 private:
  double radius_;
};

class FlatPlacer : public SurfacePlacer {
 public:
  MeshVertex place(const Vec3& approx, const Vec2& hint) const override { return {approx, hint}; }
};

struct WakeSpec {
  double length = 4.0;       // absolute length [m]
  double cell_length = 0.5;  // node spacing d [m]
  Vec3 direction = Vec3::UnitX();
};

struct RefinementPolicy {
  double max_aspect_ratio = 2.5;
  int n_uniform = 0;
  int n_curvature = 0;
  int n_tip = 0;
  double curvature_fraction = 0.3;
};

class SurfaceMesh {
 public:
  std::vector<MeshVertex> vertices;
  std::vector<Cell> cells;
  std::shared_ptr<const SurfacePlacer> placer;
  std::shared_ptr<const WingGeometry> wing;
  std::optional<WakeSpec> wake;
  /// True for wing meshes: logical boxes are meaningful (fold, TE, hanging nodes).
  bool lattice = false;
  std::int64_t ni = 0, nj = 0;
  std::map<std::pair<std::int64_t, std::int64_t>, int> vertex_at;

  bool lifting() const { return wake.has_value(); }
  /// Leeward TE vertex chain ordered spanwise, collapsed cap points merged.
  std::vector<int> trailing_edge() const;
  /// Streamwise wake cell count, round(length / d); independent of the element degree.
  int wake_stream_cells() const;
  /// Initial planar wake: one node chain per TE vertex, spacing d.
  std::vector<std::vector<Vec3>> wake_pathlines() const;
  int wake_cell_count() const;
  std::size_t total_cell_count() const { return cells.size() + wake_cell_count(); }
  /// Body area with the bilinear cell maps (2x2 Gauss is exact for flat cells).
  double body_area() const;
};

/**
 * Cell edge on the wing lattice in canonical coordinates. side: 0 at j0, 1 at j1
 * (both run along i), 2 at i0, 3 at i1 (both run along j). Fold edges of
 * leeward cells are mirrored (j -> nj - j), flagged by `mirrored`.
 */
struct LogicalEdge {
  int cell;
  int side;
  std::int64_t lo, hi;
  bool mirrored;
};

/// Edges grouped by canonical line: (0, j), (1, i) for interior i, (2, 0) and (3, 0) for the folds.
std::map<std::pair<int, std::int64_t>, std::vector<LogicalEdge>> logical_edges(const SurfaceMesh& m);

/// Coarsest wing grid: windward/leeward cells (plus flat cap cells) and the wake spec.
SurfaceMesh build_initial_grid(const WingSpec& spec, const WakeSpec& wake);

/// Aspect-ratio limiting, then uniform, curvature-adaptive and tip-local cycles.
SurfaceMesh refine(const SurfaceMesh& mesh, const RefinementPolicy& policy);

/// Isotropically split the listed cells (with 2:1 balance and TE partner closure).
SurfaceMesh refine_cells(const SurfaceMesh& mesh, std::vector<bool> flags);

/// Max angle [rad] between surface normals at the cell corners.
double cell_curvature_estimate(const SurfaceMesh& mesh, int cell);
double cell_aspect_ratio(const SurfaceMesh& mesh, int cell);

/// Equiangular cube-sphere, 6 n^2 cells, outward normals.
SurfaceMesh make_sphere_mesh(double radius, int n);
/// Axis-aligned box with n x n cells per face.
SurfaceMesh make_box_mesh(const Vec3& lo, const Vec3& hi, int n);
/// Arbitrary flat quads (vertex order gives the orientation).
SurfaceMesh make_flat_mesh(std::vector<Vec3> points, const std::vector<std::array<int, 4>>& quads);

/// Legacy ASCII VTK dump of the body quads.
void write_mesh_vtk(const SurfaceMesh& mesh, const std::string& path);

}  // namespace wingbem
