//
// wingbem -- Quadrilateral surface meshes: wing lattice grid, refinement, test bodies.
//
#include "wingbem/mesh.hpp"

#include "wingbem/fe.hpp"
#include "wingbem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace wingbem {

namespace {

constexpr std::int64_t kScale = std::int64_t(1) << 24;

using Key = std::pair<std::int64_t, std::int64_t>;

Cell make_cell(SurfaceMesh& m, const LogicalBox& b) {
  Cell c;
  c.box = b;
  c.vertices = {m.vertex_at.at({b.i0, b.j0}), m.vertex_at.at({b.i0, b.j1}),
                m.vertex_at.at({b.i1, b.j1}), m.vertex_at.at({b.i1, b.j0})};
  return c;
}

Region classify(const SurfaceMesh& m, const Cell& c) {
  if (m.wing) {
    double u = 0.0;
    for (int v : c.vertices) u += 0.25 * m.vertices[v].param.x();
    if (m.wing->spec().tip_cap == TipCap::flat && m.wing->in_cap(u)) return Region::tip;
  }
  if (m.lattice) return c.box.j0 >= m.nj / 2 ? Region::leeward : Region::windward;
  return Region::leeward;
}

int midpoint_vertex(SurfaceMesh& m, const Key& key, int a, int b) {
  auto it = m.vertex_at.find(key);
  if (it != m.vertex_at.end()) return it->second;
  const auto& va = m.vertices[a];
  const auto& vb = m.vertices[b];
  m.vertices.push_back(m.placer->place(0.5 * (va.position + vb.position), 0.5 * (va.param + vb.param)));
  const int id = static_cast<int>(m.vertices.size()) - 1;
  m.vertex_at[key] = id;
  return id;
}

int centre_vertex(SurfaceMesh& m, const Key& key, const Cell& c) {
  auto it = m.vertex_at.find(key);
  if (it != m.vertex_at.end()) return it->second;
  Vec3 p = Vec3::Zero();
  Vec2 q = Vec2::Zero();
  for (int v : c.vertices) {
    p += 0.25 * m.vertices[v].position;
    q += 0.25 * m.vertices[v].param;
  }
  m.vertices.push_back(m.placer->place(p, q));
  const int id = static_cast<int>(m.vertices.size()) - 1;
  m.vertex_at[key] = id;
  return id;
}

Cell child(SurfaceMesh& m, const Cell& parent, int parent_id, const LogicalBox& b) {
  Cell c = make_cell(m, b);
  c.parent = parent_id;
  c.level = parent.level + 1;
  c.region = classify(m, c);
  return c;
}

/// Split along i (spanwise) at the logical midpoint.
void split_i(SurfaceMesh& m, const Cell& c, int id, std::vector<Cell>& out) {
  const auto& b = c.box;
  if ((b.i1 - b.i0) % 2) throw MeshError("logical lattice exhausted (too many spanwise splits)");
  const std::int64_t im = (b.i0 + b.i1) / 2;
  midpoint_vertex(m, {im, b.j0}, m.vertex_at.at({b.i0, b.j0}), m.vertex_at.at({b.i1, b.j0}));
  midpoint_vertex(m, {im, b.j1}, m.vertex_at.at({b.i0, b.j1}), m.vertex_at.at({b.i1, b.j1}));
  out.push_back(child(m, c, id, {b.i0, im, b.j0, b.j1}));
  out.push_back(child(m, c, id, {im, b.i1, b.j0, b.j1}));
}

/// Split along j (chordwise) at the logical midpoint.
void split_j(SurfaceMesh& m, const Cell& c, int id, std::vector<Cell>& out) {
  const auto& b = c.box;
  if ((b.j1 - b.j0) % 2) throw MeshError("logical lattice exhausted (too many chordwise splits)");
  const std::int64_t jm = (b.j0 + b.j1) / 2;
  midpoint_vertex(m, {b.i0, jm}, m.vertex_at.at({b.i0, b.j0}), m.vertex_at.at({b.i0, b.j1}));
  midpoint_vertex(m, {b.i1, jm}, m.vertex_at.at({b.i1, b.j0}), m.vertex_at.at({b.i1, b.j1}));
  out.push_back(child(m, c, id, {b.i0, b.i1, b.j0, jm}));
  out.push_back(child(m, c, id, {b.i0, b.i1, jm, b.j1}));
}

void split_iso(SurfaceMesh& m, const Cell& c, int id, std::vector<Cell>& out) {
  const auto& b = c.box;
  if ((b.i1 - b.i0) % 2 || (b.j1 - b.j0) % 2) throw MeshError("logical lattice exhausted");
  const std::int64_t im = (b.i0 + b.i1) / 2, jm = (b.j0 + b.j1) / 2;
  auto V = [&](std::int64_t i, std::int64_t j) { return m.vertex_at.at({i, j}); };
  midpoint_vertex(m, {im, b.j0}, V(b.i0, b.j0), V(b.i1, b.j0));
  midpoint_vertex(m, {im, b.j1}, V(b.i0, b.j1), V(b.i1, b.j1));
  midpoint_vertex(m, {b.i0, jm}, V(b.i0, b.j0), V(b.i0, b.j1));
  midpoint_vertex(m, {b.i1, jm}, V(b.i1, b.j0), V(b.i1, b.j1));
  centre_vertex(m, {im, jm}, c);
  out.push_back(child(m, c, id, {b.i0, im, b.j0, jm}));
  out.push_back(child(m, c, id, {b.i0, im, jm, b.j1}));
  out.push_back(child(m, c, id, {im, b.i1, jm, b.j1}));
  out.push_back(child(m, c, id, {im, b.i1, b.j0, jm}));
}

/// Mean lengths of the edges running along i (spanwise) and along j (chordwise).
void edge_lengths(const SurfaceMesh& m, const Cell& c, double len_i[2], double len_j[2]) {
  const auto P = [&](int k) -> const Vec3& { return m.vertices[c.vertices[k]].position; };
  len_i[0] = (P(3) - P(0)).norm();
  len_i[1] = (P(2) - P(1)).norm();
  len_j[0] = (P(1) - P(0)).norm();
  len_j[1] = (P(2) - P(3)).norm();
}

/// 2:1 balance across edges (including the fold) and the TE partner rule.
void close_flags(const SurfaceMesh& m, std::vector<bool>& flag) {
  if (!m.lattice) return;
  const auto edges = logical_edges(m);
  std::vector<std::vector<int>> touching(m.cells.size());
  for (const auto& [key, list] : edges) {
    for (const auto& e : list) {
      for (const auto& n : list) {
        if (n.cell == e.cell) continue;
        if (n.lo < e.hi && e.lo < n.hi && (n.hi - n.lo) > (e.hi - e.lo)) touching[e.cell].push_back(n.cell);
      }
    }
  }
  std::vector<int> te_lw, te_ww;
  for (int c = 0; c < static_cast<int>(m.cells.size()); ++c) {
    if (m.cells[c].box.j1 == m.nj) te_lw.push_back(c);
    if (m.cells[c].box.j0 == 0) te_ww.push_back(c);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int c = 0; c < static_cast<int>(m.cells.size()); ++c) {
      if (!flag[c]) continue;
      for (int n : touching[c]) {
        if (!flag[n]) {
          flag[n] = true;
          changed = true;
        }
      }
      const auto& b = m.cells[c].box;
      const std::vector<int>* partners = nullptr;
      if (b.j0 == 0) partners = &te_lw;
      if (b.j1 == m.nj) partners = &te_ww;
      if (!partners) continue;
      for (int p : *partners) {
        const auto& pb = m.cells[p].box;
        if (pb.i0 < b.i1 && b.i0 < pb.i1 && (pb.i1 - pb.i0) >= (b.i1 - b.i0) && !flag[p]) {
          flag[p] = true;
          changed = true;
        }
      }
    }
  }
}

void limit_aspect_ratio(SurfaceMesh& m, double max_ar) {
  for (int round = 0; round < 200; ++round) {
    int worst = -1;
    double worst_ar = max_ar;
    bool worst_split_i = false;
    for (int c = 0; c < static_cast<int>(m.cells.size()); ++c) {
      double li[2], lj[2];
      edge_lengths(m, m.cells[c], li, lj);
      const double scale = std::max({li[0], li[1], lj[0], lj[1]});
      const double tiny = 1e-9 * scale;
      const int collapsed_i = (li[0] < tiny) + (li[1] < tiny);
      const int collapsed_j = (lj[0] < tiny) + (lj[1] < tiny);
      double ar;
      bool by_i;
      if (collapsed_i == 2 || collapsed_j == 2) {
        ar = 1e300;
        by_i = collapsed_j == 2;
      } else if (collapsed_i == 1 || collapsed_j == 1) {
        continue;
      } else {
        const double Li = 0.5 * (li[0] + li[1]), Lj = 0.5 * (lj[0] + lj[1]);
        ar = std::max(Li, Lj) / std::min(Li, Lj);
        by_i = Li > Lj;
      }
      if (ar > worst_ar) {
        worst_ar = ar;
        worst = c;
        worst_split_i = by_i;
      }
    }
    if (worst < 0) return;
    const LogicalBox wb = m.cells[worst].box;
    std::vector<Cell> next;
    for (int c = 0; c < static_cast<int>(m.cells.size()); ++c) {
      const auto& b = m.cells[c].box;
      const bool mirror = b.j0 == m.nj - wb.j1 && b.j1 == m.nj - wb.j0;
      if (worst_split_i && b.i0 == wb.i0 && b.i1 == wb.i1) {
        split_i(m, m.cells[c], c, next);
      } else if (!worst_split_i && ((b.j0 == wb.j0 && b.j1 == wb.j1) || mirror)) {
        split_j(m, m.cells[c], c, next);
      } else {
        next.push_back(m.cells[c]);
      }
    }
    for (auto& c : next) c.parent = -1, c.level = 0;
    m.cells = std::move(next);
  }
  throw MeshError("aspect-ratio limiting did not terminate");
}

void check_jacobians(const SurfaceMesh& m) {
  for (int c = 0; c < static_cast<int>(m.cells.size()); ++c) {
    std::vector<Vec3> pts;
    for (int v : m.cells[c].vertices) pts.push_back(m.vertices[v].position);
    const CellMap map({pts[0], pts[1], pts[3], pts[2]}, 1);
    const double scale = map.diameter();
    const auto& g = gauss_legendre(2);
    for (double a : g.nodes) {
      for (double b : g.nodes) {
        const auto s = map.sample(Vec2(a, b));
        if (!(s.jacobian > 1e-12 * scale * scale)) {
          std::ostringstream os;
          os << "degenerate Jacobian in refined cell " << c;
          throw MeshError(os.str());
        }
      }
    }
  }
}

}  // namespace

const char* region_name(Region r) {
  switch (r) {
    case Region::leeward: return "leeward";
    case Region::windward: return "windward";
    case Region::tip: return "tip";
    case Region::wake: return "wake";
  }
  return "?";
}

std::map<std::pair<int, std::int64_t>, std::vector<LogicalEdge>> logical_edges(const SurfaceMesh& m) {
  std::map<std::pair<int, std::int64_t>, std::vector<LogicalEdge>> map;
  for (int c = 0; c < static_cast<int>(m.cells.size()); ++c) {
    const auto& b = m.cells[c].box;
    map[{0, b.j0}].push_back({c, 0, b.i0, b.i1, false});
    map[{0, b.j1}].push_back({c, 1, b.i0, b.i1, false});
    for (int side : {2, 3}) {
      const std::int64_t i = side == 2 ? b.i0 : b.i1;
      if (i == 0 || i == m.ni) {
        const bool leeward = b.j0 >= m.nj / 2;
        const std::int64_t lo = leeward ? m.nj - b.j1 : b.j0;
        const std::int64_t hi = leeward ? m.nj - b.j0 : b.j1;
        map[{i == 0 ? 2 : 3, 0}].push_back({c, side, lo, hi, leeward});
      } else {
        map[{1, i}].push_back({c, side, b.j0, b.j1, false});
      }
    }
  }
  return map;
}

MeshVertex WingPlacer::place(const Vec3& approx, const Vec2& hint) const {
  const auto s = wing_->project(approx, hint);
  return {s.position, s.param};
}

std::optional<Vec3> WingPlacer::normal_near(const Vec2& param, const Vec2& toward) const {
  return wing_->normal(param + 1e-6 * (toward - param));
}

MeshVertex SpherePlacer::place(const Vec3& approx, const Vec2& hint) const {
  return {radius_ * approx.normalized(), hint};
}

std::vector<int> SurfaceMesh::trailing_edge() const {
  std::vector<int> chain;
  if (!lattice || !lifting()) return chain;
  std::vector<const Cell*> te;
  for (const auto& c : cells)
    if (c.box.j1 == nj) te.push_back(&c);
  std::sort(te.begin(), te.end(), [](const Cell* a, const Cell* b) { return a->box.i0 < b->box.i0; });
  const double tol = 1e-9 * std::max(1.0, wing ? wing->spec().span : 1.0);
  auto push = [&](int v) {
    if (!chain.empty() && (vertices[chain.back()].position - vertices[v].position).norm() < tol) return;
    chain.push_back(v);
  };
  for (const Cell* c : te) {
    push(c->vertices[1]);
    push(c->vertices[2]);
  }
  return chain;
}

int SurfaceMesh::wake_stream_cells() const {
  if (!wake) return 0;
  return std::max(1, static_cast<int>(std::lround(wake->length / wake->cell_length)));
}

std::vector<std::vector<Vec3>> SurfaceMesh::wake_pathlines() const {
  std::vector<std::vector<Vec3>> out;
  if (!wake) return out;
  const int n = wake_stream_cells();
  for (int v : trailing_edge()) {
    std::vector<Vec3> line;
    for (int k = 0; k <= n; ++k) line.push_back(vertices[v].position + k * wake->cell_length * wake->direction);
    out.push_back(std::move(line));
  }
  return out;
}

int SurfaceMesh::wake_cell_count() const {
  if (!wake) return 0;
  const auto te = trailing_edge();
  return te.size() < 2 ? 0 : static_cast<int>(te.size() - 1) * wake_stream_cells();
}

double SurfaceMesh::body_area() const {
  const auto& g = gauss_legendre(2);
  double area = 0.0;
  for (const auto& c : cells) {
    const CellMap map({vertices[c.vertices[0]].position, vertices[c.vertices[1]].position,
                       vertices[c.vertices[3]].position, vertices[c.vertices[2]].position},
                      1);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        area += g.weights[a] * g.weights[b] * map.sample(Vec2(g.nodes[a], g.nodes[b])).jacobian;
  }
  return area;
}

SurfaceMesh build_initial_grid(const WingSpec& spec, const WakeSpec& wake) {
  spec.validate();
  if (!(wake.length > 0.0)) throw MeshError("wake length must be positive");
  if (!(wake.cell_length > 0.0)) throw MeshError("wake cell length must be positive");
  if (spec.te_closure != TeClosure::closed) {
    throw MeshError("wing meshes require a closed trailing edge");
  }
  SurfaceMesh m;
  auto geom = std::make_shared<const WingGeometry>(spec);
  m.wing = geom;
  m.placer = std::make_shared<WingPlacer>(geom);
  WakeSpec w = wake;
  w.direction.normalize();
  m.wake = w;
  m.lattice = true;

  std::vector<double> ubreaks{0.0, 1.0};
  if (spec.tip_cap == TipCap::flat) ubreaks = {0.0, geom->cap_param(), 1.0 - geom->cap_param(), 1.0};
  const std::vector<double> vbreaks{0.0, 0.5, 1.0};
  const int nu = static_cast<int>(ubreaks.size()) - 1;
  m.ni = nu * kScale;
  m.nj = 2 * kScale;
  for (int a = 0; a <= nu; ++a) {
    for (int b = 0; b < 3; ++b) {
      const Vec2 uv(ubreaks[a], vbreaks[b]);
      m.vertices.push_back({geom->position(uv), uv});
      m.vertex_at[{a * kScale, b * kScale}] = static_cast<int>(m.vertices.size()) - 1;
    }
  }
  for (int a = 0; a < nu; ++a) {
    for (int b = 0; b < 2; ++b) {
      Cell c = make_cell(m, {a * kScale, (a + 1) * kScale, b * kScale, (b + 1) * kScale});
      c.region = classify(m, c);
      m.cells.push_back(c);
    }
  }
  return m;
}

namespace {

/// Uniform split of a mesh without a parameter lattice (test bodies).
SurfaceMesh split_all_free(const SurfaceMesh& mesh) {
  SurfaceMesh m = mesh;
  std::map<std::pair<int, int>, int> mid;
  auto place = [&m](const std::vector<int>& vs) {
    Vec3 p = Vec3::Zero();
    Vec2 q = Vec2::Zero();
    for (int v : vs) {
      p += m.vertices[v].position / static_cast<double>(vs.size());
      q += m.vertices[v].param / static_cast<double>(vs.size());
    }
    m.vertices.push_back(m.placer ? m.placer->place(p, q) : MeshVertex{p, q});
    return static_cast<int>(m.vertices.size()) - 1;
  };
  auto edge = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    const auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int id = place({a, b});
    mid[key] = id;
    return id;
  };
  std::vector<Cell> next;
  for (int id = 0; id < static_cast<int>(mesh.cells.size()); ++id) {
    const auto& c = mesh.cells[id];
    const auto& v = c.vertices;
    const int m01 = edge(v[0], v[1]), m12 = edge(v[1], v[2]), m23 = edge(v[2], v[3]), m30 = edge(v[3], v[0]);
    const int ctr = place({v[0], v[1], v[2], v[3]});
    for (const std::array<int, 4>& q : {std::array<int, 4>{v[0], m01, ctr, m30}, std::array<int, 4>{m01, v[1], m12, ctr},
                                        std::array<int, 4>{ctr, m12, v[2], m23}, std::array<int, 4>{m30, ctr, m23, v[3]}}) {
      Cell k = c;
      k.vertices = q;
      k.parent = id;
      k.level = c.level + 1;
      next.push_back(k);
    }
  }
  m.cells = std::move(next);
  return m;
}

}  // namespace

SurfaceMesh refine_cells(const SurfaceMesh& mesh, std::vector<bool> flags) {
  flags.resize(mesh.cells.size(), false);
  if (!mesh.lattice) {
    if (std::all_of(flags.begin(), flags.end(), [](bool f) { return f; })) return split_all_free(mesh);
    if (std::none_of(flags.begin(), flags.end(), [](bool f) { return f; })) return mesh;
    throw MeshError("local refinement requires a wing lattice mesh");
  }
  SurfaceMesh m = mesh;
  close_flags(m, flags);
  std::vector<Cell> next;
  for (int c = 0; c < static_cast<int>(m.cells.size()); ++c) {
    if (flags[c]) {
      split_iso(m, m.cells[c], c, next);
    } else {
      next.push_back(m.cells[c]);
    }
  }
  m.cells = std::move(next);
  return m;
}

double cell_aspect_ratio(const SurfaceMesh& mesh, int cell) {
  double li[2], lj[2];
  edge_lengths(mesh, mesh.cells[cell], li, lj);
  const double Li = 0.5 * (li[0] + li[1]), Lj = 0.5 * (lj[0] + lj[1]);
  return std::max(Li, Lj) / std::min(Li, Lj);
}

double cell_curvature_estimate(const SurfaceMesh& mesh, int cell) {
  const auto& c = mesh.cells[cell];
  Vec2 centre = Vec2::Zero();
  for (int v : c.vertices) centre += 0.25 * mesh.vertices[v].param;
  std::vector<Vec3> normals;
  const std::vector<Vec3> pts{mesh.vertices[c.vertices[0]].position, mesh.vertices[c.vertices[1]].position,
                              mesh.vertices[c.vertices[3]].position, mesh.vertices[c.vertices[2]].position};
  const CellMap map(pts, 1);
  const Vec2 corners[4] = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  for (int k = 0; k < 4; ++k) {
    const auto& v = mesh.vertices[c.vertices[k]];
    std::optional<Vec3> n;
    if (mesh.placer) n = mesh.placer->normal_near(v.param, centre);
    if (!n) {
      const auto s = map.sample(corners[k]);
      if (s.jacobian > 0.0) n = s.unit_normal;
    }
    if (n) normals.push_back(*n);
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < normals.size(); ++a)
    for (std::size_t b = a + 1; b < normals.size(); ++b)
      worst = std::max(worst, std::acos(std::clamp(normals[a].dot(normals[b]), -1.0, 1.0)));
  return worst;
}

SurfaceMesh refine(const SurfaceMesh& mesh, const RefinementPolicy& policy) {
  if (policy.n_uniform < 0 || policy.n_curvature < 0 || policy.n_tip < 0) {
    throw MeshError("refinement counts must be non-negative");
  }
  if (!(policy.max_aspect_ratio >= 1.0)) throw MeshError("max aspect ratio must be >= 1");
  SurfaceMesh m = mesh;
  if (m.lattice) limit_aspect_ratio(m, policy.max_aspect_ratio);
  for (int k = 0; k < policy.n_uniform; ++k) m = refine_cells(m, std::vector<bool>(m.cells.size(), true));
  for (int k = 0; k < policy.n_curvature; ++k) {
    const int n = static_cast<int>(m.cells.size());
    std::vector<std::pair<double, int>> est(n);
    for (int c = 0; c < n; ++c) est[c] = {cell_curvature_estimate(m, c), c};
    std::stable_sort(est.begin(), est.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const int count = static_cast<int>(std::ceil(policy.curvature_fraction * n));
    std::vector<bool> flags(n, false);
    // Cells tied with the last flagged one (spanwise rows of a straight wing) are refined together.
    const double cut = count > 0 ? est[std::min(count, n) - 1].first * (1.0 - 1e-3) : HUGE_VAL;
    for (int k2 = 0; k2 < n && (k2 < count || est[k2].first >= cut); ++k2) flags[est[k2].second] = true;
    m = refine_cells(m, flags);
  }
  for (int k = 0; k < policy.n_tip; ++k) {
    if (!m.wing) break;
    const double uc = m.wing->cap_param();
    std::vector<bool> flags(m.cells.size(), false);
    for (std::size_t c = 0; c < m.cells.size(); ++c) {
      for (int v : m.cells[c].vertices) {
        const double u = m.vertices[v].param.x();
        if (u <= uc + 1e-12 || u >= 1.0 - uc - 1e-12) flags[c] = true;
      }
    }
    m = refine_cells(m, flags);
  }
  check_jacobians(m);
  return m;
}

namespace {

SurfaceMesh make_cube_like(const Vec3& lo, const Vec3& hi, int n, bool sphere, double radius) {
  if (n < 1) throw MeshError("cells per face must be positive");
  SurfaceMesh m;
  if (sphere) {
    m.placer = std::make_shared<SpherePlacer>(radius);
  } else {
    m.placer = std::make_shared<FlatPlacer>();
  }
  std::map<std::array<long long, 3>, int> index;
  const Vec3 centre = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  auto vertex = [&](const Vec3& p) {
    const std::array<long long, 3> key{std::llround(p.x() * 1e9), std::llround(p.y() * 1e9),
                                       std::llround(p.z() * 1e9)};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    m.vertices.push_back({p, Vec2::Zero()});
    const int id = static_cast<int>(m.vertices.size()) - 1;
    index[key] = id;
    return id;
  };
  for (int axis = 0; axis < 3; ++axis) {
    for (int sgn : {-1, 1}) {
      Vec3 e = Vec3::Zero();
      e[axis] = sgn;
      Vec3 t1 = Vec3::Zero(), t2;
      t1[(axis + 1) % 3] = 1.0;
      t2 = e.cross(t1);
      auto point = [&](int a, int b) {
        double s = 2.0 * a / n - 1.0, t = 2.0 * b / n - 1.0;
        if (sphere) {
          s = std::tan(0.25 * pi * s);
          t = std::tan(0.25 * pi * t);
          return Vec3(radius * (e + s * t1 + t * t2).normalized());
        }
        const Vec3 unit = e + s * t1 + t * t2;
        return Vec3(centre + unit.cwiseProduct(half));
      };
      for (int b = 0; b < n; ++b) {
        for (int a = 0; a < n; ++a) {
          Cell c;
          c.vertices = {vertex(point(a, b)), vertex(point(a + 1, b)), vertex(point(a + 1, b + 1)),
                        vertex(point(a, b + 1))};
          c.region = Region::leeward;
          m.cells.push_back(c);
        }
      }
    }
  }
  return m;
}

}  // namespace

SurfaceMesh make_sphere_mesh(double radius, int n) {
  if (!(radius > 0.0)) throw MeshError("sphere radius must be positive");
  return make_cube_like(Vec3::Zero(), Vec3::Zero(), n, true, radius);
}

SurfaceMesh make_box_mesh(const Vec3& lo, const Vec3& hi, int n) {
  if (!((hi - lo).minCoeff() > 0.0)) throw MeshError("box must have positive extent");
  return make_cube_like(lo, hi, n, false, 0.0);
}

SurfaceMesh make_flat_mesh(std::vector<Vec3> points, const std::vector<std::array<int, 4>>& quads) {
  SurfaceMesh m;
  m.placer = std::make_shared<FlatPlacer>();
  for (const auto& p : points) m.vertices.push_back({p, Vec2::Zero()});
  for (const auto& q : quads) {
    Cell c;
    c.vertices = q;
    c.region = Region::leeward;
    m.cells.push_back(c);
  }
  return m;
}

void write_mesh_vtk(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open mesh dump for writing", path);
  os << std::setprecision(12);
  os << "# vtk DataFile Version 3.0\nwingbem mesh\nASCII\nDATASET POLYDATA\n";
  os << "POINTS " << mesh.vertices.size() << " double\n";
  for (const auto& v : mesh.vertices) os << v.position.x() << ' ' << v.position.y() << ' ' << v.position.z() << '\n';
  os << "POLYGONS " << mesh.cells.size() << ' ' << 5 * mesh.cells.size() << '\n';
  for (const auto& c : mesh.cells)
    os << "4 " << c.vertices[0] << ' ' << c.vertices[1] << ' ' << c.vertices[2] << ' ' << c.vertices[3] << '\n';
  os << "CELL_DATA " << mesh.cells.size() << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (const auto& c : mesh.cells) os << static_cast<int>(c.region) << '\n';
  if (!os) throw IoError("failed writing mesh dump", path);
}

}  // namespace wingbem
