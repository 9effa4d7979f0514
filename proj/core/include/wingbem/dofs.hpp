//
// wingbem -- Q_r Lagrange DOF distribution with hanging-node constraints,
// trailing-edge triple nodes and the structured wake sheet.
//
#pragma once

#include "wingbem/fe.hpp"
#include "wingbem/mesh.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace wingbem {

enum class DofKind : std::uint8_t { body, te_leeward, te_windward, wake_te, wake };

const char* dof_kind_name(DofKind k);

struct DofEntry {
  int dof;
  double weight;
};

struct TeTriple {
  int lw, ww, wk;
};

/// Finite element cell: geometry map plus local -> weighted global DOF lists.
struct FeCell {
  FeCell(Region region, CellMap map) : region(region), map(std::move(map)) {}

  Region region;
  int body_cell = -1;  // index into SurfaceMesh::cells
  int pathline = -1;   // wake: first of the r+1 pathlines spanned
  int stream = -1;     // wake: streamwise cell index
  CellMap map;
  std::vector<int> offset;  // n_local + 1
  std::vector<DofEntry> entries;

  int n_local() const { return map.n_local(); }
  std::span<const DofEntry> dofs(int k) const {
    return {entries.data() + offset[k], static_cast<std::size_t>(offset[k + 1] - offset[k])};
  }
  bool is_wake() const { return region == Region::wake; }
};

class DofLayout {
 public:
  int degree = 1;
  std::vector<FeCell> cells;  // body cells first, then wake cells
  int n_body_cells = 0;
  std::vector<Vec3> position;
  std::vector<DofKind> kind;
  std::vector<int> predecessor;  // previous DOF on the pathline, -1 otherwise
  std::vector<int> pathline_of;  // -1 for body DOFs
  std::vector<std::vector<int>> pathlines;
  std::vector<TeTriple> te_triples;
  int n_hanging = 0;
  double length_scale = 1.0;
  double wake_spacing = 0.0;  // node spacing along pathlines (d / r)

  int size() const { return static_cast<int>(position.size()); }
  bool is_body(int d) const {
    return kind[d] == DofKind::body || kind[d] == DofKind::te_leeward || kind[d] == DofKind::te_windward;
  }
  bool is_wake(int d) const { return !is_body(d); }
  int n_body_dofs() const;

  std::vector<std::vector<Vec3>> wake_geometry() const;
  /// Moves the wake DOFs and rebuilds the wake cell maps.
  void set_wake_geometry(const std::vector<std::vector<Vec3>>& nodes);
};

DofLayout distribute_dofs(const SurfaceMesh& mesh, int degree);

}  // namespace wingbem
