//
// wingbem -- Q_r Lagrange DOF distribution with hanging-node constraints,
// trailing-edge triple nodes and the structured wake sheet.
//
#include "wingbem/dofs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace wingbem {

namespace {

/// Spatial hash that merges points closer than tol.
class PointIndex {
 public:
  explicit PointIndex(double tol) : tol_(tol), h_(1e3 * tol) {}

  int find(const Vec3& p) const {
    const auto k = key(p);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = map_.find(Key{k[0] + dx, k[1] + dy, k[2] + dz});
          if (it == map_.end()) continue;
          for (const auto& [q, id] : it->second)
            if ((q - p).norm() < tol_) return id;
        }
    return -1;
  }
  void insert(const Vec3& p, int id) { map_[key(p)].emplace_back(p, id); }

 private:
  using Key = std::array<long long, 3>;
  struct Hash {
    std::size_t operator()(const Key& k) const {
      return std::hash<long long>()(k[0] * 73856093LL ^ k[1] * 19349663LL ^ k[2] * 83492791LL);
    }
  };
  Key key(const Vec3& p) const {
    return {static_cast<long long>(std::floor(p.x() / h_)), static_cast<long long>(std::floor(p.y() / h_)),
            static_cast<long long>(std::floor(p.z() / h_))};
  }
  double tol_, h_;
  std::unordered_map<Key, std::vector<std::pair<Vec3, int>>, Hash> map_;
};

struct Node {
  DofKind kind;
  Vec3 pos;
};

/// Lattice (a, b) of the r+1 points on a cell side, in canonical order.
std::vector<std::pair<int, int>> side_points(int side, bool mirrored, int r) {
  std::vector<std::pair<int, int>> pts;
  for (int k = 0; k <= r; ++k) {
    switch (side) {
      case 0: pts.emplace_back(0, k); break;
      case 1: pts.emplace_back(r, k); break;
      case 2: pts.emplace_back(mirrored ? r - k : k, 0); break;
      default: pts.emplace_back(mirrored ? r - k : k, r); break;
    }
  }
  return pts;
}

}  // namespace

const char* dof_kind_name(DofKind k) {
  switch (k) {
    case DofKind::body: return "body";
    case DofKind::te_leeward: return "te_leeward";
    case DofKind::te_windward: return "te_windward";
    case DofKind::wake_te: return "wake_te";
    case DofKind::wake: return "wake";
  }
  return "?";
}

int DofLayout::n_body_dofs() const {
  int n = 0;
  for (int d = 0; d < size(); ++d) n += is_body(d);
  return n;
}

std::vector<std::vector<Vec3>> DofLayout::wake_geometry() const {
  std::vector<std::vector<Vec3>> out;
  for (const auto& line : pathlines) {
    std::vector<Vec3> pts;
    for (int d : line) pts.push_back(position[d]);
    out.push_back(std::move(pts));
  }
  return out;
}

void DofLayout::set_wake_geometry(const std::vector<std::vector<Vec3>>& nodes) {
  if (nodes.size() != pathlines.size()) throw MeshError("wake geometry: pathline count mismatch");
  for (std::size_t p = 0; p < pathlines.size(); ++p) {
    if (nodes[p].size() != pathlines[p].size()) throw MeshError("wake geometry: node count mismatch");
    for (std::size_t k = 0; k < nodes[p].size(); ++k) position[pathlines[p][k]] = nodes[p][k];
  }
  const int r = degree;
  for (auto& c : cells) {
    if (!c.is_wake()) continue;
    std::vector<Vec3> support((r + 1) * (r + 1));
    for (int b = 0; b <= r; ++b)
      for (int a = 0; a <= r; ++a)
        support[tensor_index(a, b, r)] = position[pathlines[c.pathline + b][c.stream * r + a]];
    c.map = CellMap(std::move(support), r);
  }
}

DofLayout distribute_dofs(const SurfaceMesh& mesh, int r) {
  if (r < 1 || r > 3) throw DomainError("element degree must be 1, 2 or 3");
  DofLayout out;
  out.degree = r;
  const int nl = (r + 1) * (r + 1);

  Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v.position);
    hi = hi.cwiseMax(v.position);
  }
  const double L = std::max((hi - lo).norm(), 1e-12);
  out.length_scale = L;
  const double tol = 1e-9 * L;

  // Support points and node merging per DOF class.
  std::vector<Node> nodes;
  std::array<PointIndex, 3> index{PointIndex(tol), PointIndex(tol), PointIndex(tol)};
  std::vector<std::vector<int>> cell_nodes(mesh.cells.size(), std::vector<int>(nl));
  std::vector<std::vector<Vec3>> cell_support(mesh.cells.size(), std::vector<Vec3>(nl));
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& cell = mesh.cells[c];
    const auto& V = mesh.vertices;
    const MeshVertex* corner[4] = {&V[cell.vertices[0]], &V[cell.vertices[1]], &V[cell.vertices[2]],
                                   &V[cell.vertices[3]]};
    for (int b = 0; b <= r; ++b) {
      for (int a = 0; a <= r; ++a) {
        const double xi = static_cast<double>(a) / r, eta = static_cast<double>(b) / r;
        Vec3 p;
        if ((a == 0 || a == r) && (b == 0 || b == r)) {
          const int k = b == 0 ? (a == 0 ? 0 : 1) : (a == r ? 2 : 3);
          p = corner[k]->position;
        } else {
          const double w[4] = {(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
          Vec3 blend = Vec3::Zero();
          Vec2 param = Vec2::Zero();
          for (int k = 0; k < 4; ++k) {
            blend += w[k] * corner[k]->position;
            param += w[k] * corner[k]->param;
          }
          p = mesh.placer ? mesh.placer->place(blend, param).position : blend;
        }
        DofKind kind = DofKind::body;
        if (mesh.lattice && mesh.lifting()) {
          const std::int64_t j = cell.box.j0 * r + (cell.box.j1 - cell.box.j0) * a;
          if (j == 0) kind = DofKind::te_windward;
          if (j == mesh.nj * r) kind = DofKind::te_leeward;
        }
        auto& idx = index[static_cast<int>(kind)];
        int id = idx.find(p);
        if (id < 0) {
          id = static_cast<int>(nodes.size());
          nodes.push_back({kind, p});
          idx.insert(p, id);
        }
        cell_nodes[c][tensor_index(a, b, r)] = id;
        cell_support[c][tensor_index(a, b, r)] = p;
      }
    }
  }

  // Hanging-node constraints from finer neighbours along shared lattice lines.
  std::vector<std::vector<std::pair<int, double>>> constraint(nodes.size());
  std::vector<char> constrained(nodes.size(), 0);
  if (mesh.lattice) {
    const LagrangeBasis1D basis(r);
    for (const auto& [line, edges] : logical_edges(mesh)) {
      for (const auto& E : edges) {
        for (const auto& F : edges) {
          if (F.cell == E.cell) continue;
          if (!(F.lo >= E.lo && F.hi <= E.hi && (F.hi - F.lo) < (E.hi - E.lo))) continue;
          const auto cpts = side_points(E.side, E.mirrored, r);
          const auto fpts = side_points(F.side, F.mirrored, r);
          std::vector<int> masters;
          for (const auto& [a, b] : cpts) masters.push_back(cell_nodes[E.cell][tensor_index(a, b, r)]);
          for (int k = 0; k <= r; ++k) {
            const std::int64_t cf = F.lo * r + (F.hi - F.lo) * k;
            const std::int64_t rel = cf - E.lo * r;
            const std::int64_t span = (E.hi - E.lo);
            if (rel % span == 0) continue;  // coincides with a coarse lattice point
            const int node = cell_nodes[F.cell][tensor_index(fpts[k].first, fpts[k].second, r)];
            if (constrained[node]) continue;
            if (std::find(masters.begin(), masters.end(), node) != masters.end()) continue;
            const double t = static_cast<double>(rel) / static_cast<double>(span * r);
            double w[4];
            basis.eval(t, w);
            for (int m = 0; m <= r; ++m)
              if (w[m] != 0.0) constraint[node].emplace_back(masters[m], w[m]);
            constrained[node] = 1;
          }
        }
      }
    }
  }

  // TE nodes that root no wake pathline (rounded tip point beyond the last TE edge of
  // degree r) close the surface: the windward copy is tied to the leeward one.
  if (mesh.lattice && mesh.lifting()) {
    std::vector<char> is_root(nodes.size(), 0);
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
      if (mesh.cells[c].box.j1 != mesh.nj) continue;
      std::vector<int> ids;
      for (int b = 0; b <= r; ++b) ids.push_back(cell_nodes[c][tensor_index(r, b, r)]);
      bool collapsed = false;
      for (int b = 0; b < r; ++b) collapsed = collapsed || ids[b] == ids[b + 1];
      if (!collapsed)
        for (int id : ids) is_root[id] = 1;
    }
    const auto& ww_index = index[static_cast<int>(DofKind::te_windward)];
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      if (nodes[n].kind != DofKind::te_leeward || is_root[n] || constrained[n]) continue;
      const int ww = ww_index.find(nodes[n].pos);
      if (ww < 0 || constrained[ww]) continue;
      constraint[ww] = {{static_cast<int>(n), 1.0}};
      constrained[ww] = 1;
    }
  }

  // Resolve chained constraints and number the free nodes.
  std::vector<int> node_dof(nodes.size(), -1);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (constrained[n]) continue;
    node_dof[n] = static_cast<int>(out.position.size());
    out.position.push_back(nodes[n].pos);
    out.kind.push_back(nodes[n].kind);
  }
  out.n_hanging = static_cast<int>(std::count(constrained.begin(), constrained.end(), 1));
  std::vector<std::vector<DofEntry>> expanded(nodes.size());
  std::vector<char> state(nodes.size(), 0);
  std::function<const std::vector<DofEntry>&(int)> expand = [&](int n) -> const std::vector<DofEntry>& {
    if (state[n] == 2) return expanded[n];
    if (state[n] == 1) throw MeshError("cyclic hanging-node constraints");
    state[n] = 1;
    std::vector<DofEntry> e;
    if (!constrained[n]) {
      e.push_back({node_dof[n], 1.0});
    } else {
      for (const auto& [m, w] : constraint[n]) {
        for (const auto& sub : expand(m)) {
          auto it = std::find_if(e.begin(), e.end(), [&](const DofEntry& x) { return x.dof == sub.dof; });
          if (it == e.end()) {
            e.push_back({sub.dof, w * sub.weight});
          } else {
            it->weight += w * sub.weight;
          }
        }
      }
    }
    expanded[n] = std::move(e);
    state[n] = 2;
    return expanded[n];
  };

  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    FeCell fc(mesh.cells[c].region, CellMap(cell_support[c], r));
    fc.body_cell = static_cast<int>(c);
    fc.offset.push_back(0);
    for (int k = 0; k < nl; ++k) {
      for (const auto& e : expand(cell_nodes[c][k])) fc.entries.push_back(e);
      fc.offset.push_back(static_cast<int>(fc.entries.size()));
    }
    out.cells.push_back(std::move(fc));
  }
  out.n_body_cells = static_cast<int>(out.cells.size());
  out.predecessor.assign(out.position.size(), -1);
  out.pathline_of.assign(out.position.size(), -1);

  if (!mesh.lifting() || !mesh.lattice) return out;

  // Pathline roots: leeward TE nodes along non-collapsed TE edges.
  std::vector<int> te_cells;
  for (std::size_t c = 0; c < mesh.cells.size(); ++c)
    if (mesh.cells[c].box.j1 == mesh.nj) te_cells.push_back(static_cast<int>(c));
  std::sort(te_cells.begin(), te_cells.end(),
            [&](int a, int b) { return mesh.cells[a].box.i0 < mesh.cells[b].box.i0; });
  std::vector<int> roots;           // node ids
  std::vector<int> edge_first_root;  // per wake column
  for (int c : te_cells) {
    std::vector<int> ids;
    for (int b = 0; b <= r; ++b) ids.push_back(cell_nodes[c][tensor_index(r, b, r)]);
    // Fully or partially collapsed edges (rounded tip point) shed no wake column.
    bool collapsed = false;
    for (int b = 0; b < r; ++b) collapsed = collapsed || ids[b] == ids[b + 1];
    if (collapsed) continue;
    if (!roots.empty() && roots.back() == ids[0]) {
      edge_first_root.push_back(static_cast<int>(roots.size()) - 1);
      roots.insert(roots.end(), ids.begin() + 1, ids.end());
    } else {
      edge_first_root.push_back(static_cast<int>(roots.size()));
      roots.insert(roots.end(), ids.begin(), ids.end());
    }
  }

  const WakeSpec& ws = *mesh.wake;
  const int n_stream = mesh.wake_stream_cells();
  const int n_nodes = n_stream * r + 1;
  out.wake_spacing = ws.cell_length / r;
  auto& ww_index = index[static_cast<int>(DofKind::te_windward)];
  for (std::size_t p = 0; p < roots.size(); ++p) {
    const Vec3 root = nodes[roots[p]].pos;
    const int ww_node = ww_index.find(root);
    if (ww_node < 0) throw MeshError("trailing-edge node without a windward partner");
    std::vector<int> line;
    for (int k = 0; k < n_nodes; ++k) {
      const int d = static_cast<int>(out.position.size());
      out.position.push_back(root + k * out.wake_spacing * ws.direction);
      out.kind.push_back(k == 0 ? DofKind::wake_te : DofKind::wake);
      out.predecessor.push_back(k == 0 ? -1 : line.back());
      out.pathline_of.push_back(static_cast<int>(p));
      line.push_back(d);
    }
    out.te_triples.push_back({node_dof[roots[p]], node_dof[ww_node], line.front()});
    out.pathlines.push_back(std::move(line));
  }

  for (int p0 : edge_first_root) {
    for (int s = 0; s < n_stream; ++s) {
      std::vector<Vec3> support(nl);
      FeCell fc(Region::wake, CellMap(std::vector<Vec3>(nl, Vec3::Zero()), r));
      fc.pathline = p0;
      fc.stream = s;
      fc.offset.push_back(0);
      for (int b = 0; b <= r; ++b) {
        for (int a = 0; a <= r; ++a) {
          const int d = out.pathlines[p0 + b][s * r + a];
          support[tensor_index(a, b, r)] = out.position[d];
        }
      }
      for (int k = 0; k < nl; ++k) {
        const int a = k % (r + 1), b = k / (r + 1);
        fc.entries.push_back({out.pathlines[p0 + b][s * r + a], 1.0});
        fc.offset.push_back(static_cast<int>(fc.entries.size()));
      }
      fc.map = CellMap(std::move(support), r);
      out.cells.push_back(std::move(fc));
    }
  }
  return out;
}

}  // namespace wingbem
